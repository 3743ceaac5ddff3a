//! Norm concentration: deviation curves P{|‖X‖₂/√n − 1| ≥ u}, fits of the
//! profile A·exp(−B nᵅ uᵝ), the cone/surface → volume transfer, ψ_α tail
//! fits, Bernstein's envelope and the half-sphere cap inequality.

use serde::{Deserialize, Serialize};

use crate::bv::{RadialDistribution, RadialRepr};
use crate::refdist::SphericalMarginal;
use crate::samplers::{self, BodySpec, CoordinateLaw, SampleBatch};
use crate::stats::{self, LinearFit};
use crate::{invalid, quad, Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct ProfileProvenance {
    pub source: String,
    pub n_values: Vec<usize>,
    pub u_range: [f64; 2],
    pub points_used: usize,
    /// max |log P − model| over the fitted points
    pub max_log_residual: f64,
}

/// A·exp(−B nᵅ uᵝ)
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConcentrationProfile {
    #[serde(rename = "A")]
    pub a: f64,
    #[serde(rename = "B")]
    pub b: f64,
    pub alpha: f64,
    pub beta: f64,
    #[serde(default)]
    pub provenance: ProfileProvenance,
}

impl ConcentrationProfile {
    pub fn new(a: f64, b: f64, alpha: f64, beta: f64) -> Result<Self> {
        if !(a > 0.0 && b > 0.0) || !alpha.is_finite() || !(beta > 0.0 && beta.is_finite()) {
            return Err(invalid(format!(
                "profile needs A, B, β > 0 and finite α; got A={a}, B={b}, α={alpha}, β={beta}"
            )));
        }
        Ok(Self {
            a,
            b,
            alpha,
            beta,
            provenance: ProfileProvenance { source: "manual".into(), ..Default::default() },
        })
    }

    pub fn probability(&self, n: usize, u: f64) -> f64 {
        (self.a * (-self.b * (n as f64).powf(self.alpha) * u.powf(self.beta)).exp()).min(1.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeviationPoint {
    pub u: f64,
    pub p_hat: f64,
    pub stderr: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeviationCurve {
    pub n: usize,
    /// sample count behind the curve; `None` for exact/synthetic curves
    pub samples: Option<u64>,
    pub points: Vec<DeviationPoint>,
}

impl DeviationCurve {
    /// Exact curve from a known profile.
    pub fn synthetic(profile: &ConcentrationProfile, n: usize, u_grid: &[f64]) -> Self {
        let points = u_grid
            .iter()
            .map(|&u| DeviationPoint { u, p_hat: profile.probability(n, u), stderr: 0.0 })
            .collect();
        Self { n, samples: None, points }
    }
}

/// Deviation curve of an empirical radial law r = ‖X‖₂/√n.
pub fn deviation_from_radial(radial: &RadialDistribution, u_grid: &[f64]) -> Result<DeviationCurve> {
    check_u_grid(u_grid)?;
    let r = match radial.repr() {
        RadialRepr::Empirical { samples } => samples,
        _ => return Err(invalid("deviation curves need an empirical radial law")),
    };
    let mut dev: Vec<f64> = r.iter().map(|x| (x - 1.0).abs()).collect();
    dev.sort_by(f64::total_cmp);
    let total = dev.len() as f64;
    let points = u_grid
        .iter()
        .map(|&u| {
            let below = dev.partition_point(|&d| d < u);
            let p = (dev.len() - below) as f64 / total;
            DeviationPoint { u, p_hat: p, stderr: (p * (1.0 - p) / total).sqrt() }
        })
        .collect();
    Ok(DeviationCurve { n: radial.dim(), samples: Some(dev.len() as u64), points })
}

/// P{|‖X‖₂/√n − 1| ≥ u} on `u_grid` with binomial standard errors. The
/// batch is already divided by its normalization constant.
pub fn empirical_deviation(batch: &SampleBatch, u_grid: &[f64]) -> Result<DeviationCurve> {
    if batch.rows == 0 {
        return Err(invalid("empty batch"));
    }
    deviation_from_radial(&samplers::radial_projection(batch)?, u_grid)
}

/// Streaming variant for large N.
pub fn deviation_curve(spec: &BodySpec, total: usize, seed: u64, u_grid: &[f64]) -> Result<DeviationCurve> {
    let radial = samplers::radial_sample(spec, total, seed, samplers::DEFAULT_CHUNK)?;
    deviation_from_radial(&radial, u_grid)
}

fn check_u_grid(u_grid: &[f64]) -> Result<()> {
    if let Some(u) = u_grid.iter().find(|u| !(0.0..=1.0).contains(*u)) {
        return Err(invalid(format!("u = {u} outside [0, 1]")));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// exponent search shared by the profile and ψ_α fits
// ---------------------------------------------------------------------------

struct Group {
    x: Vec<f64>,
    y: Vec<f64>,
    w: Vec<f64>,
}

/// Per-group fits of y ≈ a_g − b_g·xᵉ with a common e.
fn grouped_fits(groups: &[Group], e: f64) -> Option<(Vec<LinearFit>, f64)> {
    let mut fits = Vec::with_capacity(groups.len());
    let mut sse = 0.0;
    for g in groups {
        let xe: Vec<f64> = g.x.iter().map(|x| x.powf(e)).collect();
        let (f, s) = stats::weighted_regression(&xe, &g.y, &g.w)?;
        fits.push(f);
        sse += s;
    }
    Some((fits, sse))
}

fn best_exponent(groups: &[Group], lo: f64, hi: f64) -> Option<f64> {
    let sse = |e: f64| grouped_fits(groups, e).map_or(f64::INFINITY, |(_, s)| s);
    let steps = 240;
    let grid: Vec<f64> = (0..=steps)
        .map(|i| (lo.ln() + (hi / lo).ln() * i as f64 / steps as f64).exp())
        .collect();
    let (imin, _) = grid
        .iter()
        .map(|&e| sse(e))
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(&b.1))?;
    let (mut a, mut b) = (grid[imin.saturating_sub(1)], grid[(imin + 1).min(steps)]);
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (sse(c), sse(d));
    for _ in 0..200 {
        if (b - a).abs() < 1e-12 * b.abs() {
            break;
        }
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = sse(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = sse(d);
        }
    }
    let e = 0.5 * (a + b);
    sse(e).is_finite().then_some(e)
}

// log P is usable when 0 < P < 1 and, for Monte Carlo curves, backed by at
// least 10 exceedances; weights are the inverse delta-method variance.
fn usable(p: f64, samples: Option<u64>) -> Option<f64> {
    if !(p > 0.0 && p < 1.0) {
        return None;
    }
    match samples {
        None => Some(1.0),
        Some(n) => {
            let count = p * n as f64;
            (count >= 10.0).then_some(count / (1.0 - p))
        }
    }
}

/// Points with P̂ above this are bulk, not tail, and are left out of fits.
pub const FIT_P_MAX: f64 = 0.5;

/// [`fit_profile_with`] at the default tail window P̂ ≤ ½.
pub fn fit_profile(curves: &[DeviationCurve]) -> Result<ConcentrationProfile> {
    fit_profile_with(curves, FIT_P_MAX)
}

/// Staged fit: common β by 1-D search over per-n fits of log P = a_n − b_n uᵝ,
/// then α from the slope of log b_n against log n, then (A, B) by regressing
/// log P on nᵅuᵝ.
pub fn fit_profile_with(curves: &[DeviationCurve], p_max: f64) -> Result<ConcentrationProfile> {
    let mut groups = Vec::new();
    let mut ns = Vec::new();
    let mut u_range = [f64::INFINITY, f64::NEG_INFINITY];
    for c in curves {
        let mut g = Group { x: vec![], y: vec![], w: vec![] };
        for pt in &c.points {
            if pt.u <= 0.0 || pt.p_hat > p_max {
                continue;
            }
            if let Some(w) = usable(pt.p_hat, c.samples) {
                g.x.push(pt.u);
                g.y.push(pt.p_hat.ln());
                g.w.push(w);
            }
        }
        if g.x.len() >= 4 {
            for &u in &g.x {
                u_range = [u_range[0].min(u), u_range[1].max(u)];
            }
            groups.push(g);
            ns.push(c.n);
        }
    }
    if groups.len() < 3 {
        return Err(Error::InsufficientDynamicRange(format!(
            "need 3 curves with ≥ 4 probabilities in (0, {p_max}], got {} of {}",
            groups.len(),
            curves.len()
        )));
    }
    let beta = best_exponent(&groups, 0.1, 8.0)
        .ok_or_else(|| Error::InsufficientDynamicRange("β search failed".into()))?;
    let (fits, _) = grouped_fits(&groups, beta).expect("β search succeeded");
    let b_n: Vec<f64> = fits.iter().map(|f| -f.slope).collect();
    if b_n.iter().any(|&b| !(b > 0.0)) {
        return Err(Error::InsufficientDynamicRange(
            "a per-dimension rate is not positive".into(),
        ));
    }
    let ln_n: Vec<f64> = ns.iter().map(|&n| (n as f64).ln()).collect();
    let ln_b: Vec<f64> = b_n.iter().map(|b| b.ln()).collect();
    let alpha = stats::linear_regression(&ln_n, &ln_b)
        .ok_or_else(|| Error::InsufficientDynamicRange("need distinct n".into()))?
        .slope;

    let (mut x, mut y, mut w) = (vec![], vec![], vec![]);
    for (g, &n) in groups.iter().zip(&ns) {
        let na = (n as f64).powf(alpha);
        for i in 0..g.x.len() {
            x.push(na * g.x[i].powf(beta));
            y.push(g.y[i]);
            w.push(g.w[i]);
        }
    }
    let (fit, _) = stats::weighted_regression(&x, &y, &w)
        .ok_or_else(|| Error::InsufficientDynamicRange("degenerate final regression".into()))?;
    let mut profile = ConcentrationProfile::new(fit.intercept.exp(), -fit.slope, alpha, beta)
        .map_err(|e| Error::InsufficientDynamicRange(e.to_string()))?;
    profile.provenance = ProfileProvenance {
        source: "fit".into(),
        n_values: ns,
        u_range,
        points_used: x.len(),
        max_log_residual: fit.max_residual,
    };
    Ok(profile)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TransferSource {
    Cone,
    Surface,
}

/// Volume-measure profile implied by a cone or surface profile:
/// (A + 1, min(B·2^{−β}, ½), min(α, 1), max(β, 1)). The constants come from
/// splitting at u/2 and bounding the radial part P{R < 1 − u/2} by e^{−nu/2}.
pub fn transfer_profile(profile: &ConcentrationProfile, source: TransferSource) -> ConcentrationProfile {
    let mut out = profile.clone();
    out.a = profile.a + 1.0;
    out.b = (profile.b * 2f64.powf(-profile.beta)).min(0.5);
    out.alpha = profile.alpha.min(1.0);
    out.beta = profile.beta.max(1.0);
    out.provenance.source = format!("transfer from {source:?}").to_lowercase();
    out
}

// ---------------------------------------------------------------------------
// ψ_α tails
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TailFit {
    pub alpha: f64,
    /// rate c in C·exp(−c sᵅ)
    pub c: f64,
    /// prefactor C
    pub big_c: f64,
    pub s_range: [f64; 2],
    pub r2: f64,
    pub points_used: usize,
}

/// Fits log P̂{X > s} = log C − c·sᵅ over a 24-point grid on `s_range`.
/// α is found by 1-D search; (log C, c) by weighted least squares.
pub fn psi_alpha_fit(samples: &[f64], s_range: (f64, f64)) -> Result<TailFit> {
    let (lo, hi) = s_range;
    if samples.len() < 10_000 {
        return Err(invalid(format!("need at least 10⁴ samples, got {}", samples.len())));
    }
    if !(lo > 0.0 && hi > lo) {
        return Err(invalid(format!("bad s range [{lo}, {hi}]")));
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let total = sorted.len();
    let above = |s: f64| total - sorted.partition_point(|&x| x <= s);
    if above(lo) < 100 {
        return Err(Error::InsufficientTailMass(format!(
            "only {} samples exceed s = {lo}",
            above(lo)
        )));
    }
    let mut g = Group { x: vec![], y: vec![], w: vec![] };
    for i in 0..24 {
        let s = lo + (hi - lo) * i as f64 / 23.0;
        let p = above(s) as f64 / total as f64;
        if let Some(w) = usable(p, Some(total as u64)) {
            g.x.push(s);
            g.y.push(p.ln());
            g.w.push(w);
        }
    }
    if g.x.len() < 4 {
        return Err(Error::InsufficientTailMass("fewer than 4 usable grid points".into()));
    }
    let groups = [g];
    let alpha = best_exponent(&groups, 0.2, 6.0)
        .ok_or_else(|| Error::InsufficientTailMass("exponent search failed".into()))?;
    let (fits, _) = grouped_fits(&groups, alpha).expect("search succeeded");
    Ok(TailFit {
        alpha,
        c: -fits[0].slope,
        big_c: fits[0].intercept.exp(),
        s_range: [lo, hi],
        r2: fits[0].r2,
        points_used: groups[0].x.len(),
    })
}

// ---------------------------------------------------------------------------
// Bernstein
// ---------------------------------------------------------------------------

/// exp(−ε²n/(16C²)) for 0 ≤ ε ≤ c_regime·√n.
pub fn bernstein_envelope(big_c: f64, eps: f64, n: usize, c_regime: f64) -> Result<f64> {
    if !(big_c > 0.0) {
        return Err(invalid(format!("moment constant must be positive, got {big_c}")));
    }
    let edge = c_regime * (n as f64).sqrt();
    if !(eps >= 0.0 && eps <= edge) {
        return Err(Error::OutsideRegime {
            what: "Bernstein",
            detail: format!("ε = {eps} outside [0, {edge}]"),
        });
    }
    Ok((-eps * eps * n as f64 / (16.0 * big_c * big_c)).exp())
}

/// Smallest C with E exp(h/C) ≤ 2 for h = U² − ⅓, U uniform on [−1, 1].
pub fn centered_uniform_sq_constant() -> f64 {
    let m = |c: f64| {
        (-1.0 / (3.0 * c)).exp()
            * quad::gauss_kronrod(|s| (s * s / c).exp(), 0.0, 1.0, 1e-14, 1e-13).value
    };
    let (mut lo, mut hi) = (0.01, 10.0);
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if m(mid) <= 2.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BernsteinRow {
    pub eps: f64,
    pub empirical: f64,
    pub envelope: f64,
    pub holds: bool,
}

/// Monte Carlo frequency of Σ(Uᵢ² − ⅓) > εn against the envelope.
pub fn bernstein_mc_check(n: usize, trials: usize, eps_grid: &[f64], seed: u64) -> Result<Vec<BernsteinRow>> {
    let c = centered_uniform_sq_constant();
    let spec = BodySpec::product(CoordinateLaw::Uniform { a: 1.0 }, n)?;
    let sums: Vec<f64> = samplers::map_chunks(&spec, trials, seed, samplers::DEFAULT_CHUNK, |_, rows| {
        rows.chunks_exact(n)
            .map(|r| r.iter().map(|x| x * x - 1.0 / 3.0).sum::<f64>())
            .collect::<Vec<_>>()
    })
    .concat();
    eps_grid
        .iter()
        .map(|&eps| {
            let envelope = bernstein_envelope(c, eps, n, 1.0)?;
            let hits = sums.iter().filter(|&&s| s > eps * n as f64).count();
            let empirical = hits as f64 / trials as f64;
            Ok(BernsteinRow { eps, empirical, envelope, holds: empirical <= envelope })
        })
        .collect()
}

// ---------------------------------------------------------------------------
// sphere caps
// ---------------------------------------------------------------------------

/// x₁-threshold of the Euclidean γ-extension of {x₁ ≤ 0} on the unit sphere:
/// the chord from (x₁, x′) to (0, x′/|x′|) has length² 2 − 2√(1 − x₁²), which
/// is ≤ γ² iff x₁ ≤ γ√(1 − γ²/4).
pub fn cap_extension_height(gamma: f64) -> f64 {
    gamma * (1.0 - 0.25 * gamma * gamma).sqrt()
}

/// Euclidean distance from a unit vector with first coordinate x₁ to {x₁ ≤ 0}.
pub fn distance_to_half_sphere(x1: f64) -> f64 {
    if x1 <= 0.0 {
        0.0
    } else {
        (2.0 - 2.0 * (1.0 - x1 * x1).max(0.0).sqrt()).max(0.0).sqrt()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CapRow {
    pub gamma: f64,
    pub h: f64,
    /// σ({A}_γ)
    pub sigma_ext: f64,
    /// σ(A)·(1 − σ({A}_γ))
    pub lhs: f64,
    /// exp(−(n−1)γ²/4)
    pub rhs: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SphereCapReport {
    pub n: usize,
    pub rows: Vec<CapRow>,
}

impl SphereCapReport {
    pub fn all_hold(&self) -> bool {
        self.rows.iter().all(|r| r.holds)
    }
}

/// Half-sphere A = {x₁ ≤ 0} against exp(−(n−1)γ²/4), exactly via the
/// first-coordinate marginal: σ({A}_γ) = Ψₙ(√n·h(γ)).
pub fn sphere_cap_check(n: usize, gammas: &[f64]) -> Result<SphereCapReport> {
    let psi = SphericalMarginal::new(n)?;
    let sn = (n as f64).sqrt();
    let rows = gammas
        .iter()
        .map(|&g| {
            if !(0.0..=1.0).contains(&g) {
                return Err(invalid(format!("γ = {g} outside [0, 1]")));
            }
            let h = cap_extension_height(g);
            let tail = psi.sf(sn * h);
            let lhs = 0.5 * tail;
            let rhs = (-((n - 1) as f64) * g * g / 4.0).exp();
            Ok(CapRow { gamma: g, h, sigma_ext: 1.0 - tail, lhs, rhs, holds: lhs <= rhs })
        })
        .collect::<Result<_>>()?;
    Ok(SphereCapReport { n, rows })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CapMonteCarlo {
    pub gamma: f64,
    pub samples: usize,
    pub lhs_mc: f64,
    pub lhs_analytic: f64,
    /// binomial standard error of lhs_mc at the analytic probability
    pub stderr: f64,
    pub agree: bool,
}

/// Monte Carlo estimate of σ(A)(1 − σ({A}_γ)) from distances of uniform
/// sphere points to A, compared with the analytic value within 3 standard
/// errors.
pub fn sphere_cap_monte_carlo(n: usize, gamma: f64, total: usize, seed: u64) -> Result<CapMonteCarlo> {
    let analytic = sphere_cap_check(n, &[gamma])?.rows[0];
    let spec = BodySpec::sphere(n)?;
    let far: usize = samplers::map_chunks(&spec, total, seed, samplers::DEFAULT_CHUNK, |_, rows| {
        rows.chunks_exact(n).filter(|r| distance_to_half_sphere(r[0]) > gamma).count()
    })
    .into_iter()
    .sum();
    let f = far as f64 / total as f64;
    let p = 1.0 - analytic.sigma_ext;
    let stderr = 0.5 * (p * (1.0 - p) / total as f64).sqrt();
    let lhs_mc = 0.5 * f;
    // below resolution both sides are "no hits expected"
    let tol = (3.0 * stderr).max(0.5 / total as f64);
    Ok(CapMonteCarlo {
        gamma,
        samples: total,
        lhs_mc,
        lhs_analytic: analytic.lhs,
        stderr,
        agree: (lhs_mc - analytic.lhs).abs() <= tol,
    })
}

/// Slope of log E‖V‖₂ against log n for cone samples of B_p^n, with the
/// fitted prefactor. The expected slope is ½ − 1/p.
pub fn cone_norm_growth(p: f64, dims: &[usize], total: usize, seed: u64) -> Result<LinearFit> {
    let mut x = Vec::new();
    let mut y = Vec::new();
    for &n in dims {
        let radial = samplers::radial_sample(&BodySpec::lp_cone(p, n)?, total, seed, samplers::DEFAULT_CHUNK)?;
        // radial holds ‖V‖₂/√n
        x.push((n as f64).ln());
        y.push((radial.mean() * (n as f64).sqrt()).ln());
    }
    stats::linear_regression(&x, &y).ok_or_else(|| invalid("need two distinct dimensions"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn synthetic_round_trip() {
        let truth = ConcentrationProfile::new(2.0, 1.0, 1.0, 2.0).unwrap();
        let u: Vec<f64> = (0..10).map(|i| 0.2 + 0.03 * i as f64).collect();
        let curves: Vec<_> =
            [16, 32, 64].iter().map(|&n| DeviationCurve::synthetic(&truth, n, &u)).collect();
        let f = fit_profile(&curves).unwrap();
        for (got, want) in [(f.a, 2.0), (f.b, 1.0), (f.alpha, 1.0), (f.beta, 2.0)] {
            assert!((got / want - 1.0).abs() < 0.02, "{got} vs {want}");
        }
        assert!(f.provenance.max_log_residual < 1e-6);
    }

    #[test]
    fn degenerate_curves_rejected() {
        let u = [0.1, 0.2, 0.3, 0.4, 0.5];
        let flat = |n| DeviationCurve {
            n,
            samples: Some(1000),
            points: u.iter().map(|&u| DeviationPoint { u, p_hat: 0.0, stderr: 0.0 }).collect(),
        };
        let r = fit_profile(&[flat(8), flat(16), flat(32)]);
        assert!(matches!(r, Err(Error::InsufficientDynamicRange(_))));
    }

    #[test]
    fn transfer_exponents() {
        let t = |a, b| {
            let p = ConcentrationProfile::new(1.0, 1.0, a, b).unwrap();
            let q = transfer_profile(&p, TransferSource::Cone);
            (q.alpha, q.beta)
        };
        assert_eq!(t(1.0, 2.0), (1.0, 2.0));
        assert_eq!(t(0.5, 1.0), (0.5, 1.0));
        assert_eq!(t(2.0, 0.5), (1.0, 1.0));
    }

    #[test]
    fn bernstein_arithmetic() {
        assert_eq!(bernstein_envelope(1.0, 0.0, 100, 1.0).unwrap(), 1.0);
        let v = bernstein_envelope(1.0, 0.4, 100, 1.0).unwrap();
        assert!((v - (-1f64).exp()).abs() < 1e-15);
        assert!(matches!(bernstein_envelope(1.0, 11.0, 100, 1.0), Err(Error::OutsideRegime { .. })));
    }

    #[test]
    fn cap_geometry() {
        assert_eq!(sphere_cap_check(8, &[0.0]).unwrap().rows[0].lhs, 0.25);
        for &x1 in &[0.1, 0.3, 0.7] {
            let g = distance_to_half_sphere(x1);
            assert!((cap_extension_height(g) - x1).abs() < 1e-12);
        }
        let r = sphere_cap_check(128, &[0.5]).unwrap().rows[0];
        assert!(r.holds && (r.rhs - (-127.0f64 / 16.0).exp()).abs() < 1e-15);
    }

    #[test]
    fn profile_json_field_names() {
        let p = ConcentrationProfile::new(2.0, 1.0, 1.0, 2.0).unwrap();
        let j = serde_json::to_value(&p).unwrap();
        assert_eq!(j["A"], 2.0);
        assert_eq!(j["B"], 1.0);
        assert!(j["provenance"].is_object());
    }
}
