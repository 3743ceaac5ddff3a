//! Exact samplers: uniform sphere, ℓₚ cone and volume measures
//! (gamma-variable construction), and coordinate-product laws.
//!
//! All sampling is chunked. Chunk `i` of a run draws from its own
//! `ChaCha8Rng` seeded with [`substream_seed`]`(seed, i)`, and chunks are
//! merged in index order, so a batch depends only on
//! (spec, N, seed, chunk size) and never on the thread count.
//!
//! Generalized Gaussian coordinates with density e^{−|t|ᵖ}/(2Γ(1+1/p)) are
//! drawn as |g| = W^{1/p}, W ~ Gamma(1/p, 1), with an independent fair sign:
//! if W has that gamma law then P(W^{1/p} ∈ dt) ∝ t^{p−1}·t^{1−p}e^{−tᵖ} dt.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bv::RadialDistribution;
use crate::special::{normal_cdf, normal_pdf};
use crate::{invalid, quad, Result};

pub const DEFAULT_CHUNK: usize = 4096;

/// ℓₚ exponent in [1, ∞]. Serialized as a number, or the string "inf".
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Exponent(pub f64);

impl Exponent {
    pub fn is_inf(self) -> bool {
        self.0.is_infinite()
    }
}

impl Serialize for Exponent {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        if self.is_inf() {
            s.serialize_str("inf")
        } else {
            s.serialize_f64(self.0)
        }
    }
}

impl<'de> Deserialize<'de> for Exponent {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Str(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(p) => Ok(Exponent(p)),
            Raw::Str(s) if s == "inf" => Ok(Exponent(f64::INFINITY)),
            Raw::Str(s) => Err(serde::de::Error::custom(format!("bad exponent {s:?}"))),
        }
    }
}

impl std::fmt::Display for Exponent {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.is_inf() {
            write!(f, "inf")
        } else {
            write!(f, "{}", self.0)
        }
    }
}

/// Built-in symmetric coordinate laws.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "law", rename_all = "snake_case")]
pub enum CoordinateLaw {
    /// uniform on [−a, a]
    Uniform { a: f64 },
    /// ±1 with probability ½ each
    Rademacher,
    /// standard normal conditioned on [−c, c]
    TruncatedNormal { c: f64 },
}

impl CoordinateLaw {
    pub fn variance(&self) -> f64 {
        match *self {
            CoordinateLaw::Uniform { a } => a * a / 3.0,
            CoordinateLaw::Rademacher => 1.0,
            CoordinateLaw::TruncatedNormal { c } => {
                1.0 - 2.0 * c * normal_pdf(c) / (2.0 * normal_cdf(c) - 1.0)
            }
        }
    }

    /// E exp(X²/C²)
    pub fn exp_square_moment(&self, big_c: f64) -> f64 {
        let k = 1.0 / (big_c * big_c);
        match *self {
            CoordinateLaw::Uniform { a } => {
                quad::gauss_kronrod(|s| (k * a * a * s * s).exp(), 0.0, 1.0, 1e-14, 1e-13).value
            }
            CoordinateLaw::Rademacher => k.exp(),
            CoordinateLaw::TruncatedNormal { c } => {
                let mass = 2.0 * normal_cdf(c) - 1.0;
                2.0 * quad::gauss_kronrod(|x| normal_pdf(x) * (k * x * x).exp(), 0.0, c, 1e-14, 1e-13)
                    .value
                    / mass
            }
        }
    }

    /// Smallest C with E exp(X²/C²) ≤ 2 (the ψ₂ norm), by bisection.
    pub fn psi2_norm(&self) -> f64 {
        let mut hi = 1.0;
        while self.exp_square_moment(hi) > 2.0 {
            hi *= 2.0;
            if hi > 1e12 {
                return f64::INFINITY;
            }
        }
        let mut lo = 0.0;
        for _ in 0..80 {
            let mid = 0.5 * (lo + hi);
            if mid > 0.0 && self.exp_square_moment(mid) <= 2.0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        hi
    }

    fn validate(&self) -> Result<()> {
        let ok = match *self {
            CoordinateLaw::Uniform { a } => a > 0.0 && a.is_finite(),
            CoordinateLaw::Rademacher => true,
            CoordinateLaw::TruncatedNormal { c } => c > 0.0 && c.is_finite(),
        };
        if !ok {
            return Err(invalid(format!("bad coordinate law parameters {self:?}")));
        }
        let c = self.psi2_norm();
        if !c.is_finite() {
            return Err(invalid(format!("{self:?} fails the sub-Gaussian moment check")));
        }
        Ok(())
    }

    fn draw<R: Rng>(&self, rng: &mut R) -> f64 {
        match *self {
            CoordinateLaw::Uniform { a } => rng.random_range(-a..=a),
            CoordinateLaw::Rademacher => {
                if rng.random::<bool>() {
                    1.0
                } else {
                    -1.0
                }
            }
            CoordinateLaw::TruncatedNormal { c } => loop {
                if c < 1.0 {
                    let x = rng.random_range(-c..=c);
                    if rng.random::<f64>() < (-0.5 * x * x).exp() {
                        break x;
                    }
                } else {
                    let x: f64 = StandardNormal.sample(rng);
                    if x.abs() <= c {
                        break x;
                    }
                }
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BodyKind {
    Sphere,
    /// unnormalized G with i.i.d. generalized Gaussian coordinates
    GenGaussian { p: Exponent },
    LpCone { p: Exponent },
    LpVolume { p: Exponent },
    Product { law: CoordinateLaw },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum Normalization {
    Raw,
    /// samples divided by C
    Scaled { c: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BodySpec {
    pub kind: BodyKind,
    pub n: usize,
    pub normalization: Normalization,
}

impl BodySpec {
    pub fn sphere(n: usize) -> Result<Self> {
        Self::new(BodyKind::Sphere, n)
    }
    pub fn gen_gaussian(p: f64, n: usize) -> Result<Self> {
        Self::new(BodyKind::GenGaussian { p: Exponent(p) }, n)
    }
    pub fn lp_cone(p: f64, n: usize) -> Result<Self> {
        Self::new(BodyKind::LpCone { p: Exponent(p) }, n)
    }
    pub fn lp_volume(p: f64, n: usize) -> Result<Self> {
        Self::new(BodyKind::LpVolume { p: Exponent(p) }, n)
    }
    pub fn product(law: CoordinateLaw, n: usize) -> Result<Self> {
        Self::new(BodyKind::Product { law }, n)
    }

    pub fn new(kind: BodyKind, n: usize) -> Result<Self> {
        let s = Self { kind, n, normalization: Normalization::Raw };
        s.validate()?;
        Ok(s)
    }

    /// Same body with samples divided by `c`.
    pub fn scaled(mut self, c: f64) -> Result<Self> {
        if !(c > 0.0 && c.is_finite()) {
            return Err(invalid(format!("scale must be positive, got {c}")));
        }
        self.normalization = Normalization::Scaled { c };
        Ok(self)
    }

    /// Product law rescaled to unit coordinate variance.
    pub fn isotropic_product(law: CoordinateLaw, n: usize) -> Result<Self> {
        Self::product(law, n)?.scaled(law.variance().sqrt())
    }

    pub fn scale(&self) -> f64 {
        match self.normalization {
            Normalization::Raw => 1.0,
            Normalization::Scaled { c } => c,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 1 {
            return Err(invalid("n must be at least 1"));
        }
        match self.kind {
            BodyKind::Sphere if self.n < 2 => Err(invalid("sphere needs n ≥ 2")),
            BodyKind::GenGaussian { p } | BodyKind::LpCone { p } => {
                if !(p.0 >= 1.0) || p.is_inf() {
                    Err(invalid(format!("p must lie in [1, ∞) here, got {p}")))
                } else {
                    Ok(())
                }
            }
            BodyKind::LpVolume { p } if !(p.0 >= 1.0) => {
                Err(invalid(format!("p must lie in [1, ∞], got {p}")))
            }
            BodyKind::Product { law } => law.validate(),
            _ => Ok(()),
        }
    }

    /// Draws one row into `out` (length n), before normalization.
    fn draw_raw<R: Rng>(&self, rng: &mut R, out: &mut [f64]) {
        match self.kind {
            BodyKind::Sphere => {
                for x in out.iter_mut() {
                    *x = StandardNormal.sample(rng);
                }
                let r = out.iter().map(|x| x * x).sum::<f64>().sqrt();
                out.iter_mut().for_each(|x| *x /= r);
            }
            BodyKind::GenGaussian { p } => gen_gaussian_row(p.0, rng, out),
            BodyKind::LpCone { p } => {
                gen_gaussian_row(p.0, rng, out);
                let r = lp_norm(out, p.0);
                out.iter_mut().for_each(|x| *x /= r);
            }
            BodyKind::LpVolume { p } if p.is_inf() => {
                for x in out.iter_mut() {
                    *x = rng.random_range(-1.0..=1.0);
                }
            }
            BodyKind::LpVolume { p } => {
                gen_gaussian_row(p.0, rng, out);
                let r = lp_norm(out, p.0);
                let u: f64 = rng.random();
                let rad = u.powf(1.0 / out.len() as f64);
                out.iter_mut().for_each(|x| *x *= rad / r);
            }
            BodyKind::Product { law } => {
                for x in out.iter_mut() {
                    *x = law.draw(rng);
                }
            }
        }
    }
}

fn gen_gaussian_row<R: Rng>(p: f64, rng: &mut R, out: &mut [f64]) {
    if p == 2.0 {
        // density e^{−t²}/√π is N(0, ½)
        for x in out.iter_mut() {
            let z: f64 = StandardNormal.sample(rng);
            *x = z * std::f64::consts::FRAC_1_SQRT_2;
        }
        return;
    }
    let gamma = Gamma::new(1.0 / p, 1.0).expect("shape 1/p is positive");
    for x in out.iter_mut() {
        let w: f64 = gamma.sample(rng);
        let m = w.powf(1.0 / p);
        *x = if rng.random::<bool>() { m } else { -m };
    }
}

/// ‖x‖ₚ, with p = ∞ the max norm.
pub fn lp_norm(x: &[f64], p: f64) -> f64 {
    if p.is_infinite() {
        return x.iter().fold(0.0, |m, v| m.max(v.abs()));
    }
    if p == 2.0 {
        return x.iter().map(|v| v * v).sum::<f64>().sqrt();
    }
    if p == 1.0 {
        return x.iter().map(|v| v.abs()).sum();
    }
    let m = x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if m == 0.0 {
        return 0.0;
    }
    m * x.iter().map(|v| (v.abs() / m).powf(p)).sum::<f64>().powf(1.0 / p)
}

/// splitmix64 finalizer of (seed, chunk): the documented substream rule.
pub fn substream_seed(seed: u64, chunk: u64) -> u64 {
    let mut z = seed ^ chunk.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Row range of chunk `i`.
fn chunk_rows(i: usize, total: usize, chunk: usize) -> usize {
    chunk.min(total - i * chunk)
}

/// Generates chunk `i` (row-major, normalized) into `buf`.
pub fn fill_chunk(spec: &BodySpec, seed: u64, i: usize, rows: usize, buf: &mut Vec<f64>) {
    let n = spec.n;
    buf.clear();
    buf.resize(rows * n, 0.0);
    let mut rng = ChaCha8Rng::seed_from_u64(substream_seed(seed, i as u64));
    let s = spec.scale();
    for row in buf.chunks_exact_mut(n) {
        spec.draw_raw(&mut rng, row);
        if s != 1.0 {
            row.iter_mut().for_each(|x| *x /= s);
        }
    }
}

/// Streams N samples through `f(chunk_index, rows)` in parallel and returns
/// the per-chunk results in chunk order. Nothing beyond one chunk per worker
/// is held in memory.
pub fn map_chunks<R, F>(spec: &BodySpec, total: usize, seed: u64, chunk: usize, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(usize, &[f64]) -> R + Sync,
{
    let chunks = total.div_ceil(chunk);
    (0..chunks)
        .into_par_iter()
        .map_init(Vec::new, |buf, i| {
            fill_chunk(spec, seed, i, chunk_rows(i, total, chunk), buf);
            f(i, buf)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChunkMeta {
    pub chunk_size: usize,
    pub substream_seeds: Vec<u64>,
}

/// N × n sample matrix with everything needed to regenerate it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleBatch {
    pub spec: BodySpec,
    pub seed: u64,
    pub rows: usize,
    pub layout: ChunkMeta,
    /// row-major, `rows × spec.n`
    pub points: Vec<f64>,
}

impl SampleBatch {
    pub fn row(&self, i: usize) -> &[f64] {
        &self.points[i * self.spec.n..(i + 1) * self.spec.n]
    }

    pub fn iter_rows(&self) -> std::slice::ChunksExact<'_, f64> {
        self.points.chunks_exact(self.spec.n)
    }

    /// Values of coordinate j.
    pub fn column(&self, j: usize) -> Vec<f64> {
        self.iter_rows().map(|r| r[j]).collect()
    }
}

/// Materialized batch (fine for desk-scale N·n; use [`map_chunks`] otherwise).
pub fn sample(spec: &BodySpec, total: usize, seed: u64) -> Result<SampleBatch> {
    sample_chunked(spec, total, seed, DEFAULT_CHUNK)
}

pub fn sample_chunked(spec: &BodySpec, total: usize, seed: u64, chunk: usize) -> Result<SampleBatch> {
    spec.validate()?;
    if total == 0 || chunk == 0 {
        return Err(invalid("N and the chunk size must be positive"));
    }
    let parts = map_chunks(spec, total, seed, chunk, |_, rows| rows.to_vec());
    let substream_seeds = (0..parts.len() as u64).map(|i| substream_seed(seed, i)).collect();
    Ok(SampleBatch {
        spec: *spec,
        seed,
        rows: total,
        layout: ChunkMeta { chunk_size: chunk, substream_seeds },
        points: parts.concat(),
    })
}

pub fn sample_sphere(n: usize, total: usize, seed: u64) -> Result<SampleBatch> {
    sample(&BodySpec::sphere(n)?, total, seed)
}

pub fn sample_gen_gaussian(p: f64, n: usize, total: usize, seed: u64) -> Result<SampleBatch> {
    sample(&BodySpec::gen_gaussian(p, n)?, total, seed)
}

pub fn sample_cone_lp(p: f64, n: usize, total: usize, seed: u64) -> Result<SampleBatch> {
    sample(&BodySpec::lp_cone(p, n)?, total, seed)
}

pub fn sample_volume_lp(p: f64, n: usize, total: usize, seed: u64) -> Result<SampleBatch> {
    sample(&BodySpec::lp_volume(p, n)?, total, seed)
}

pub fn sample_product(law: CoordinateLaw, n: usize, total: usize, seed: u64) -> Result<SampleBatch> {
    sample(&BodySpec::product(law, n)?, total, seed)
}

/// Empirical law of ‖row‖₂/√n.
pub fn radial_projection(batch: &SampleBatch) -> Result<RadialDistribution> {
    let sn = (batch.spec.n as f64).sqrt();
    let r = batch.iter_rows().map(|row| lp_norm(row, 2.0) / sn).collect();
    RadialDistribution::empirical(batch.spec.n, r)
}

/// Streaming version of [`radial_projection`]: same values as
/// `radial_projection(&sample_chunked(..))` without storing the points.
pub fn radial_sample(spec: &BodySpec, total: usize, seed: u64, chunk: usize) -> Result<RadialDistribution> {
    spec.validate()?;
    let sn = (spec.n as f64).sqrt();
    let parts = map_chunks(spec, total, seed, chunk, |_, rows| {
        rows.chunks_exact(spec.n).map(|r| lp_norm(r, 2.0) / sn).collect::<Vec<_>>()
    });
    RadialDistribution::empirical(spec.n, parts.concat())
}

/// CDF of one coordinate of the generalized Gaussian law, by quadrature.
pub fn gen_gaussian_cdf(p: f64, t: f64) -> f64 {
    let norm = 2.0 * libm::tgamma(1.0 + 1.0 / p);
    let half = |a: f64| {
        quad::gauss_kronrod(|x| (-x.powf(p)).exp(), 0.0, a, 1e-14, 1e-12).value / norm
    };
    if t >= 0.0 {
        0.5 + half(t)
    } else {
        0.5 - half(-t)
    }
}
