//! Experiment drivers: average-marginal tails and densities against the
//! spherical and Gaussian laws, and per-direction sweeps.

use std::collections::BTreeMap;
use std::path::Path;

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::bv::{self, RadialDistribution};
use crate::concentration::ConcentrationProfile;
use crate::refdist::{gauss_density, gauss_tail, SphericalMarginal};
use crate::samplers::{self, BodyKind, BodySpec, Normalization, DEFAULT_CHUNK};
use crate::stats;
use crate::{invalid, Error, Result};

/// Minimum expected exceedances for a Monte Carlo tail estimate to count.
pub const MIN_EXCEEDANCES: f64 = 50.0;
/// Pilot size for the empirical normalization constant.
pub const PILOT_SAMPLES: usize = 100_000;

// stream tags for RNG draws that are not body samples
const DIRECTION_STREAM: u64 = 0xD1EC_7105;
const THETA_STREAM: u64 = 0x7E7A_0001;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TailMethod {
    /// exact spherical tail given |X|, averaged over the radial sample
    BvFromRadial,
    /// indicator of ⟨X, Θ⟩ ≥ t with a fresh uniform Θ per sample
    DirectMc,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Flavor {
    Tail,
    Density,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub spec: BodySpec,
    pub samples: usize,
    pub seed: u64,
    pub chunk_size: usize,
    /// normalization constant the samples were divided by
    pub scale: f64,
    pub directions: Option<usize>,
    pub t_grid: Vec<f64>,
    pub version: String,
}

impl Provenance {
    fn new(spec: &BodySpec, samples: usize, seed: u64, t_grid: &[f64]) -> Self {
        Self {
            spec: *spec,
            samples,
            seed,
            chunk_size: DEFAULT_CHUNK,
            scale: spec.scale(),
            directions: None,
            t_grid: t_grid.to_vec(),
            version: env!("CARGO_PKG_VERSION").to_string(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailRow {
    pub t: f64,
    /// 1 − F̂^av(t) or f̂^av(t)
    pub estimate: f64,
    pub stderr: f64,
    /// 1 − Ψₙ(t) or ψₙ(t)
    pub spherical: f64,
    /// 1 − Φ(t) or φ(t)
    pub gaussian: f64,
    pub ratio_spherical: f64,
    pub ratio_gaussian: f64,
    /// C t^{2max(β,1)} n^{−α} when a profile is supplied and t is in regime
    pub theorem_bound: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TailRatioReport {
    pub flavor: Flavor,
    pub method: TailMethod,
    pub provenance: Provenance,
    pub rows: Vec<TailRow>,
}

impl TailRatioReport {
    /// sup_t |ratio_spherical − 1|
    pub fn max_spherical_deviation(&self) -> f64 {
        self.rows.iter().map(|r| (r.ratio_spherical - 1.0).abs()).fold(0.0, f64::max)
    }
}

fn sorted_grid(t_grid: &[f64]) -> Result<Vec<f64>> {
    if t_grid.is_empty() {
        return Err(invalid("empty t grid"));
    }
    if let Some(t) = t_grid.iter().find(|t| !t.is_finite()) {
        return Err(invalid(format!("t = {t} is not finite")));
    }
    let mut g = t_grid.to_vec();
    g.sort_by(f64::total_cmp);
    Ok(g)
}

/// Radial sample ‖X‖₂/√n of the (normalized) body.
pub fn radial_of(spec: &BodySpec, total: usize, seed: u64) -> Result<RadialDistribution> {
    samplers::radial_sample(spec, total, seed, DEFAULT_CHUNK)
}

/// 1 − F^av on `t_grid` with its ratio to 1 − Ψₙ and 1 − Φ.
pub fn estimate_avg_tail(
    spec: &BodySpec,
    t_grid: &[f64],
    total: usize,
    seed: u64,
    method: TailMethod,
    profile: Option<&ConcentrationProfile>,
) -> Result<TailRatioReport> {
    let grid = sorted_grid(t_grid)?;
    let n = spec.n;
    let psi = SphericalMarginal::new(n)?;
    let est: Vec<(f64, f64)> = match method {
        TailMethod::BvFromRadial => {
            let radial = radial_of(spec, total, seed)?;
            grid.iter().map(|&t| bv::avg_tail_with_stderr(&radial, t)).collect::<Result<_>>()?
        }
        TailMethod::DirectMc => direct_mc_tail(spec, &grid, total, seed)?,
    };
    let rows = grid
        .iter()
        .zip(est)
        .map(|(&t, (e, se))| {
            let sph = psi.sf(t);
            let g = gauss_tail(t);
            TailRow {
                t,
                estimate: e,
                stderr: se,
                spherical: sph,
                gaussian: g,
                ratio_spherical: e / sph,
                ratio_gaussian: e / g,
                theorem_bound: profile.and_then(|p| bv::theorem_bound(p, n, t).ok()),
            }
        })
        .collect();
    Ok(TailRatioReport { flavor: Flavor::Tail, method, provenance: Provenance::new(spec, total, seed, &grid), rows })
}

fn direct_mc_tail(spec: &BodySpec, grid: &[f64], total: usize, seed: u64) -> Result<Vec<(f64, f64)>> {
    let n = spec.n;
    let theta_seed = samplers::substream_seed(seed, THETA_STREAM);
    let counts = samplers::map_chunks(spec, total, seed, DEFAULT_CHUNK, |i, rows| {
        let mut rng = ChaCha8Rng::seed_from_u64(samplers::substream_seed(theta_seed, i as u64));
        let mut theta = vec![0.0; n];
        let mut c = vec![0u64; grid.len() + 1];
        for x in rows.chunks_exact(n) {
            for v in theta.iter_mut() {
                *v = StandardNormal.sample(&mut rng);
            }
            let norm = samplers::lp_norm(&theta, 2.0);
            let s = x.iter().zip(&theta).map(|(a, b)| a * b).sum::<f64>() / norm;
            c[grid.partition_point(|&t| t <= s)] += 1;
        }
        c
    });
    let exceed = cumulative_exceedances(&counts, grid.len());
    let nf = total as f64;
    grid.iter()
        .zip(exceed)
        .map(|(&t, k)| {
            if (k as f64) < MIN_EXCEEDANCES {
                return Err(Error::TailTooDeep(format!(
                    "{k} exceedances of t = {t} among N = {total} (need {MIN_EXCEEDANCES})"
                )));
            }
            let p = k as f64 / nf;
            Ok((p, (p * (1.0 - p) / nf).sqrt()))
        })
        .collect()
}

// c[j] counts samples with exactly j grid points ≤ s; returns #{s ≥ t_k}
fn cumulative_exceedances(chunks: &[Vec<u64>], len: usize) -> Vec<u64> {
    let mut hist = vec![0u64; len + 1];
    for c in chunks {
        for (h, v) in hist.iter_mut().zip(c) {
            *h += v;
        }
    }
    let mut out = vec![0u64; len];
    let mut acc = 0;
    for k in (0..len).rev() {
        acc += hist[k + 1];
        out[k] = acc;
    }
    out
}

/// f^av on `t_grid` by the exact transform of the empirical radial law.
pub fn estimate_avg_density(spec: &BodySpec, t_grid: &[f64], total: usize, seed: u64) -> Result<TailRatioReport> {
    let grid = sorted_grid(t_grid)?;
    let psi = SphericalMarginal::new(spec.n)?;
    let radial = radial_of(spec, total, seed)?;
    let rows = grid
        .iter()
        .map(|&t| {
            let (e, se) = bv::avg_density_with_stderr(&radial, t)?;
            let sph = psi.density(t);
            let g = gauss_density(t);
            Ok(TailRow {
                t,
                estimate: e,
                stderr: se,
                spherical: sph,
                gaussian: g,
                ratio_spherical: e / sph,
                ratio_gaussian: e / g,
                theorem_bound: None,
            })
        })
        .collect::<Result<_>>()?;
    Ok(TailRatioReport {
        flavor: Flavor::Density,
        method: TailMethod::BvFromRadial,
        provenance: Provenance::new(spec, total, seed, &grid),
        rows,
    })
}

// ---------------------------------------------------------------------------
// direction sweeps
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Directions {
    /// M directions uniform on the sphere, drawn from the run seed
    Random(usize),
    /// explicit directions (normalized on use)
    Given(Vec<Vec<f64>>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DirectionRow {
    pub index: usize,
    /// sup over the included t of |estimate/reference − 1|
    pub sup_deviation: f64,
    /// some included t had no samples in range, so the ratio there is degenerate
    pub flagged: bool,
    /// per-t estimates (tail or density) on `t_used`
    pub estimates: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DirectionSweepReport {
    pub flavor: Flavor,
    pub provenance: Provenance,
    pub t_max: f64,
    /// histogram bin width for the density flavor
    pub bin_width: Option<f64>,
    /// grid points included in the sups
    pub t_used: Vec<f64>,
    /// grid points dropped because (1 − Φ(t))·N < 50
    pub t_excluded: Vec<f64>,
    /// average-marginal deviation from Φ measured on the same samples
    pub eps_hat: f64,
    pub threshold_factor: f64,
    /// fraction of directions whose sup deviation exceeds threshold_factor·ε̂
    pub exceed_fraction: f64,
    pub median_sup: f64,
    /// mean binomial standard error of the per-t estimates
    pub mean_stderr: f64,
    pub directions: Vec<DirectionRow>,
}

impl DirectionSweepReport {
    /// Fraction of directions whose every ratio lies in [1 − kε̂, 1 + kε̂].
    pub fn fraction_within(&self, k: f64) -> f64 {
        let band = k * self.eps_hat;
        let ok = self.directions.iter().filter(|d| d.sup_deviation <= band).count();
        ok as f64 / self.directions.len() as f64
    }
}

fn unit_directions(dirs: &Directions, n: usize, seed: u64) -> Result<Vec<Vec<f64>>> {
    match dirs {
        Directions::Random(m) => {
            if *m == 0 {
                return Err(invalid("need at least one direction"));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(samplers::substream_seed(seed, DIRECTION_STREAM));
            Ok((0..*m)
                .map(|_| {
                    let mut v: Vec<f64> = (0..n).map(|_| StandardNormal.sample(&mut rng)).collect();
                    let r = samplers::lp_norm(&v, 2.0);
                    v.iter_mut().for_each(|x| *x /= r);
                    v
                })
                .collect())
        }
        Directions::Given(list) => list
            .iter()
            .map(|v| {
                if v.len() != n {
                    return Err(invalid(format!("direction has length {}, expected {n}", v.len())));
                }
                let r = samplers::lp_norm(v, 2.0);
                if !(r > 0.0) {
                    return Err(invalid("zero direction"));
                }
                Ok(v.iter().map(|x| x / r).collect())
            })
            .collect(),
    }
}

/// One pass over the samples: for each direction, #{⟨X, ξ⟩ ≥ e} at every
/// edge, plus the radial sample of the same points.
fn sweep_pass(
    spec: &BodySpec,
    total: usize,
    seed: u64,
    dirs: &[Vec<f64>],
    edges: &[f64],
) -> Result<(Vec<Vec<u64>>, RadialDistribution)> {
    let n = spec.n;
    let sn = (n as f64).sqrt();
    let e = edges.len();
    let parts = samplers::map_chunks(spec, total, seed, DEFAULT_CHUNK, |_, rows| {
        let mut hist = vec![0u64; dirs.len() * (e + 1)];
        let mut radii = Vec::with_capacity(rows.len() / n);
        for x in rows.chunks_exact(n) {
            radii.push(samplers::lp_norm(x, 2.0) / sn);
            for (m, d) in dirs.iter().enumerate() {
                let s: f64 = x.iter().zip(d).map(|(a, b)| a * b).sum();
                hist[m * (e + 1) + edges.partition_point(|&t| t <= s)] += 1;
            }
        }
        (hist, radii)
    });
    let mut counts = Vec::with_capacity(dirs.len());
    for m in 0..dirs.len() {
        let per: Vec<Vec<u64>> = parts.iter().map(|(h, _)| h[m * (e + 1)..(m + 1) * (e + 1)].to_vec()).collect();
        counts.push(cumulative_exceedances(&per, e));
    }
    let radii: Vec<f64> = parts.into_iter().flat_map(|(_, r)| r).collect();
    Ok((counts, RadialDistribution::empirical(n, radii)?))
}

fn median(v: &[f64]) -> f64 {
    let mut s: Vec<f64> = v.iter().copied().filter(|x| x.is_finite()).collect();
    if s.is_empty() {
        return f64::NAN;
    }
    s.sort_by(f64::total_cmp);
    let k = s.len();
    if k % 2 == 1 {
        s[k / 2]
    } else {
        0.5 * (s[k / 2 - 1] + s[k / 2])
    }
}

pub const THRESHOLD_FACTOR: f64 = 10.0;

fn check_isotropic(spec: &BodySpec, t_max: f64, t_grid: &[f64]) -> Result<()> {
    let unit = exact_coordinate_scale(spec).is_some_and(|c| (c - 1.0).abs() < 1e-12);
    if matches!(spec.normalization, Normalization::Raw) && !unit {
        return Err(invalid("direction sweeps need an isotropically scaled body"));
    }
    let top = t_grid.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !(t_max <= top) {
        return Err(invalid(format!("T = {t_max} exceeds the largest grid point {top}")));
    }
    Ok(())
}

/// Tail sweep: per direction ξ, sup over t ≤ T of |(1 − F̂^ξ(t))/(1 − Φ(t)) − 1|.
pub fn direction_sweep(
    spec: &BodySpec,
    t_max: f64,
    t_grid: &[f64],
    dirs: &Directions,
    total: usize,
    seed: u64,
) -> Result<DirectionSweepReport> {
    let grid = sorted_grid(t_grid)?;
    check_isotropic(spec, t_max, &grid)?;
    let dirs_v = unit_directions(dirs, spec.n, seed)?;
    let nf = total as f64;
    let (used, excluded): (Vec<f64>, Vec<f64>) =
        grid.iter().filter(|&&t| t <= t_max).partition(|&&t| gauss_tail(t) * nf >= MIN_EXCEEDANCES);
    let (counts, radial) = sweep_pass(spec, total, seed, &dirs_v, &used)?;
    let mut eps_hat: f64 = 0.0;
    for &t in &used {
        eps_hat = eps_hat.max((bv::avg_tail(&radial, t)? / gauss_tail(t) - 1.0).abs());
    }
    let mut se_sum = 0.0;
    let rows: Vec<DirectionRow> = counts
        .iter()
        .enumerate()
        .map(|(m, c)| {
            let estimates: Vec<f64> = c.iter().map(|&k| k as f64 / nf).collect();
            se_sum += estimates.iter().map(|p| (p * (1.0 - p) / nf).sqrt()).sum::<f64>();
            let sup = used
                .iter()
                .zip(&estimates)
                .map(|(&t, p)| (p / gauss_tail(t) - 1.0).abs())
                .fold(0.0, f64::max);
            DirectionRow { index: m, sup_deviation: sup, flagged: c.contains(&0), estimates }
        })
        .collect();
    finish(Flavor::Tail, spec, total, seed, &grid, t_max, None, used, excluded, eps_hat, se_sum, rows)
}

#[allow(clippy::too_many_arguments)]
fn finish(
    flavor: Flavor,
    spec: &BodySpec,
    total: usize,
    seed: u64,
    grid: &[f64],
    t_max: f64,
    bin_width: Option<f64>,
    used: Vec<f64>,
    excluded: Vec<f64>,
    eps_hat: f64,
    se_sum: f64,
    rows: Vec<DirectionRow>,
) -> Result<DirectionSweepReport> {
    let sups: Vec<f64> = rows.iter().map(|r| r.sup_deviation).collect();
    let threshold = THRESHOLD_FACTOR * eps_hat;
    let exceed = sups.iter().filter(|&&s| s > threshold).count();
    let mut provenance = Provenance::new(spec, total, seed, grid);
    provenance.directions = Some(rows.len());
    let cells = (rows.len() * used.len()).max(1) as f64;
    Ok(DirectionSweepReport {
        flavor,
        provenance,
        t_max,
        bin_width,
        t_used: used,
        t_excluded: excluded,
        eps_hat,
        threshold_factor: THRESHOLD_FACTOR,
        exceed_fraction: exceed as f64 / rows.len() as f64,
        median_sup: median(&sups),
        mean_stderr: se_sum / cells,
        directions: rows,
    })
}

/// Density sweep: centered histogram bins (F̂(t + h/2) − F̂(t − h/2))/h against φ.
pub fn local_direction_sweep(
    spec: &BodySpec,
    t_max: f64,
    t_grid: &[f64],
    h: f64,
    dirs: &Directions,
    total: usize,
    seed: u64,
) -> Result<DirectionSweepReport> {
    if !(h > 0.0) {
        return Err(invalid(format!("bin width must be positive, got {h}")));
    }
    let grid = sorted_grid(t_grid)?;
    check_isotropic(spec, t_max, &grid)?;
    let dirs_v = unit_directions(dirs, spec.n, seed)?;
    let nf = total as f64;
    // bin mass ≈ h·φ(t); need 50 expected hits
    let (used, excluded): (Vec<f64>, Vec<f64>) =
        grid.iter().filter(|&&t| t <= t_max).partition(|&&t| h * gauss_density(t) * nf >= MIN_EXCEEDANCES);
    let mut edges: Vec<f64> = used.iter().flat_map(|&t| [t - 0.5 * h, t + 0.5 * h]).collect();
    edges.sort_by(f64::total_cmp);
    let (counts, radial) = sweep_pass(spec, total, seed, &dirs_v, &edges)?;
    let edge_idx = |x: f64| edges.partition_point(|&e| e < x);
    let mut eps_hat: f64 = 0.0;
    for &t in &used {
        eps_hat = eps_hat.max((bv::avg_density(&radial, t)? / gauss_density(t) - 1.0).abs());
    }
    let mut se_sum = 0.0;
    let rows: Vec<DirectionRow> = counts
        .iter()
        .enumerate()
        .map(|(m, c)| {
            let mut flagged = false;
            let estimates: Vec<f64> = used
                .iter()
                .map(|&t| {
                    let k = c[edge_idx(t - 0.5 * h)] - c[edge_idx(t + 0.5 * h)];
                    flagged |= k == 0;
                    let p = k as f64 / nf;
                    se_sum += (p * (1.0 - p) / nf).sqrt() / h;
                    p / h
                })
                .collect();
            let sup = used
                .iter()
                .zip(&estimates)
                .map(|(&t, f)| (f / gauss_density(t) - 1.0).abs())
                .fold(0.0, f64::max);
            DirectionRow { index: m, sup_deviation: sup, flagged, estimates }
        })
        .collect();
    finish(Flavor::Density, spec, total, seed, &grid, t_max, Some(h), used, excluded, eps_hat, se_sum, rows)
}

/// Exact P{(ε₁ + … + εₙ)/√n ≥ t} for Rademacher signs.
pub fn rademacher_sum_tail(n: u64, t: f64) -> f64 {
    let sn = (n as f64).sqrt();
    (0..=n)
        .filter(|&k| (2.0 * k as f64 - n as f64) / sn >= t)
        .map(|k| stats::binomial_ln_pmf(k, n, 0.5).exp())
        .sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BudgetMode {
    Integral,
    Local,
}

/// {c₁ n εᵏ / (ln n + ln 1/ε + ln 1/ζ)}^{1/6} with k = 2 (integral) or 4 (local).
pub fn corollary_t_budget(n: f64, eps: f64, zeta: f64, mode: BudgetMode, c1: f64) -> Result<f64> {
    if !(eps > 0.0 && eps <= 1.0) || !(zeta > 0.0 && zeta <= 1.0) {
        return Err(invalid(format!("ε and ζ must lie in (0, 1], got ε={eps}, ζ={zeta}")));
    }
    if !(n >= 1.0) || !(c1 > 0.0) {
        return Err(invalid(format!("need n ≥ 1 and c₁ > 0, got n={n}, c₁={c1}")));
    }
    let k = match mode {
        BudgetMode::Integral => 2,
        BudgetMode::Local => 4,
    };
    let denom = n.ln() - eps.ln() - zeta.ln();
    if !(denom > 0.0) {
        return Err(invalid("log denominator is not positive"));
    }
    Ok((c1 * n * eps.powi(k) / denom).powf(1.0 / 6.0))
}

// ---------------------------------------------------------------------------
// normalization constants
// ---------------------------------------------------------------------------

/// Coordinate standard deviation where it is known in closed form.
pub fn exact_coordinate_scale(spec: &BodySpec) -> Option<f64> {
    let n = spec.n as f64;
    match spec.kind {
        BodyKind::Sphere => Some(1.0 / n.sqrt()),
        BodyKind::LpCone { p } if p.0 == 2.0 => Some(1.0 / n.sqrt()),
        BodyKind::LpVolume { p } if p.is_inf() => Some(1.0 / 3f64.sqrt()),
        // uniform ball: E‖X‖² = n/(n+2)
        BodyKind::LpVolume { p } if p.0 == 2.0 => Some((1.0 / (n + 2.0)).sqrt()),
        BodyKind::Product { law } => Some(law.variance().sqrt()),
        BodyKind::GenGaussian { p } => {
            // E g² = Γ(3/p)/Γ(1/p)
            Some((libm::lgamma(3.0 / p.0) - libm::lgamma(1.0 / p.0)).exp().sqrt())
        }
        _ => None,
    }
}

/// Standard deviation of the first coordinate over a pilot batch.
pub fn estimate_coordinate_scale(spec: &BodySpec, pilot: usize, seed: u64) -> Result<f64> {
    let mut raw = *spec;
    raw.normalization = Normalization::Raw;
    let n = raw.n;
    let parts = samplers::map_chunks(&raw, pilot, seed, DEFAULT_CHUNK, |_, rows| {
        rows.chunks_exact(n).map(|r| r[0]).collect::<Vec<_>>()
    });
    let (_, v) = stats::mean_var(&parts.concat());
    Ok(v.sqrt())
}

/// Cached empirical normalization constants keyed by body (JSON file).
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ScaleCache {
    pub pilot_samples: usize,
    pub seed: u64,
    pub entries: BTreeMap<String, f64>,
}

impl ScaleCache {
    pub fn new(seed: u64) -> Self {
        Self { pilot_samples: PILOT_SAMPLES, seed, entries: BTreeMap::new() }
    }

    pub fn load(path: &Path) -> Result<Self> {
        Ok(serde_json::from_str(&std::fs::read_to_string(path)?)?)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, serde_json::to_string_pretty(self)?)?;
        Ok(())
    }

    fn key(spec: &BodySpec) -> String {
        let mut raw = *spec;
        raw.normalization = Normalization::Raw;
        serde_json::to_string(&raw).expect("spec serializes")
    }

    /// Closed form when available, else the cached or freshly estimated pilot value.
    pub fn scale_for(&mut self, spec: &BodySpec) -> Result<f64> {
        if let Some(c) = exact_coordinate_scale(spec) {
            return Ok(c);
        }
        let key = Self::key(spec);
        if let Some(&c) = self.entries.get(&key) {
            return Ok(c);
        }
        let c = estimate_coordinate_scale(spec, self.pilot_samples, self.seed)?;
        self.entries.insert(key, c);
        Ok(c)
    }

    /// The body divided by its coordinate standard deviation.
    pub fn isotropic(&mut self, spec: &BodySpec) -> Result<BodySpec> {
        let c = self.scale_for(spec)?;
        let mut raw = *spec;
        raw.normalization = Normalization::Raw;
        raw.scaled(c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn budget_examples() {
        let t = corollary_t_budget(std::f64::consts::E, 1.0, 1.0, BudgetMode::Integral, 1.0).unwrap();
        assert!((t - std::f64::consts::E.powf(1.0 / 6.0)).abs() < 1e-14);
        assert!((t - 1.1814).abs() < 1e-4);
        let e = 0.3;
        let a = corollary_t_budget(1e4, e, 0.1, BudgetMode::Local, 1.0).unwrap();
        let b = corollary_t_budget(1e4, e, 0.1, BudgetMode::Integral, 1.0).unwrap();
        assert!((a / b - e.powf(1.0 / 3.0)).abs() < 1e-14);
        let t = corollary_t_budget(1e6, 0.1, 0.01, BudgetMode::Integral, 1.0).unwrap();
        let expect = (1e6 * 0.01 / (1e6f64.ln() + 10f64.ln() + 100f64.ln())).powf(1.0 / 6.0);
        assert!((t - expect).abs() < 1e-14);
    }

    #[test]
    fn rademacher_tail_oracle() {
        assert!((rademacher_sum_tail(20, -100.0) - 1.0).abs() < 1e-14);
        // P(S ≥ 0) = ½ + ½ P(S = 0)
        let p0 = stats::binomial_ln_pmf(10, 20, 0.5).exp();
        assert!((rademacher_sum_tail(20, 0.0) - (0.5 + 0.5 * p0)).abs() < 1e-14);
    }

    #[test]
    fn exceedance_accumulation() {
        let c = vec![vec![1, 2, 3], vec![0, 1, 1]];
        assert_eq!(cumulative_exceedances(&c, 2), vec![7, 4]);
    }

    #[test]
    fn exact_scales() {
        let s = BodySpec::lp_volume(f64::INFINITY, 10).unwrap();
        assert_eq!(exact_coordinate_scale(&s), Some(1.0 / 3f64.sqrt()));
        let g = BodySpec::gen_gaussian(2.0, 3).unwrap();
        assert!((exact_coordinate_scale(&g).unwrap() - 0.5f64.sqrt()).abs() < 1e-14);
    }
}
