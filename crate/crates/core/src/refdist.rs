//! Reference laws: the spherical marginal ψₙ and the standard normal φ.
//!
//! ψₙ(t) = Γ(n/2) / (√(πn) Γ((n−1)/2)) · (1 − t²/n)^{(n−3)/2} on [−√n, √n]
//! is the law of one coordinate of a uniform point on the sphere of radius
//! √n. All evaluation happens in log space; the tail 1 − Ψₙ(t) is computed
//! from the regularized incomplete beta identity
//! 1 − Ψₙ(t) = I_x(a, a), x = (1 − t/√n)/2, a = (n − 1)/2
//! (see [`TAIL_METHOD`]), with an adaptive Simpson path kept for
//! cross-checking.

use serde::{Deserialize, Serialize};

use crate::special::{self, ln_gamma_half_ratio, normal_ln_pdf, normal_ln_sf};
use crate::{invalid, quad, Error, Result};

/// How [`SphericalMarginal::sf`] is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TailMethod {
    /// Symmetric incomplete beta via continued fraction, log-space prefactor.
    IncompleteBeta,
    /// Adaptive Simpson on the density, interval halving to 1e−12.
    AdaptiveSimpson,
}

/// The method used by default for Ψₙ.
pub const TAIL_METHOD: TailMethod = TailMethod::IncompleteBeta;

/// Empirical sup over n ∈ {16,…,4096}, t ∈ [1, √(n/8)] of
/// max(R, 1/R) with R = (1 − Ψₙ(t)) / (t⁻¹ψₙ(t)). Produced by
/// [`sphder_envelope`] over [`SPHDER_SCAN_DIMS`] and rounded up.
pub const SPHDER_CONSTANT: f64 = 1.6;

/// Dimensions scanned for [`SPHDER_CONSTANT`].
pub const SPHDER_SCAN_DIMS: [usize; 9] = [16, 32, 64, 128, 256, 512, 1024, 2048, 4096];

/// Envelope of the normalized log-ratio ln(ψₙ(t)/ψₙ((1+u)t)) / (u t²) over
/// the scan in [`logder_envelope`] on [`LOGDER_SCAN_DIMS`]: every scanned
/// value lies in `[LOGDER_BOUNDS.0, LOGDER_BOUNDS.1]` (observed 0.630, 2.236).
pub const LOGDER_BOUNDS: (f64, f64) = (0.6, 2.5);

/// Dimensions scanned for [`LOGDER_BOUNDS`]; the lower bound needs n > 6.
pub const LOGDER_SCAN_DIMS: [usize; 7] = [8, 16, 64, 256, 1024, 4096, 100_000];

/// sup of (1 − Φ(t − s)) / ((1 − Φ(t)) e^{st}) over t ∈ (0, 10], s ∈ [0, t]
/// (observed 1.2720 near t = s = 0.6). The inequality with constant 1 fails
/// for small s > 0.
pub const NORMAL_SHIFT_CONSTANT: f64 = 1.28;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SphericalMarginal {
    n: usize,
    /// ln of the normalizing constant Γ(n/2)/(√(πn)Γ((n−1)/2))
    ln_norm: f64,
    sqrt_n: f64,
}

impl SphericalMarginal {
    pub fn new(n: usize) -> Result<Self> {
        if n < 3 {
            return Err(Error::Dimension { n, min: 3 });
        }
        let nf = n as f64;
        let a = 0.5 * (nf - 1.0);
        let ln_norm = ln_gamma_half_ratio(a) - 0.5 * (std::f64::consts::PI * nf).ln();
        Ok(Self { n, ln_norm, sqrt_n: nf.sqrt() })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// √n, the edge of the support.
    pub fn support_edge(&self) -> f64 {
        self.sqrt_n
    }

    fn exponent(&self) -> f64 {
        0.5 * (self.n as f64 - 3.0)
    }

    fn inside(&self, t: f64) -> bool {
        if self.n == 3 {
            t * t <= 3.0
        } else {
            t * t < self.n as f64
        }
    }

    /// ln ψₙ(t); `-inf` outside the support.
    pub fn log_density(&self, t: f64) -> f64 {
        if !self.inside(t) {
            return f64::NEG_INFINITY;
        }
        if self.n == 3 {
            return self.ln_norm;
        }
        self.ln_norm + self.exponent() * (-t * t / self.n as f64).ln_1p()
    }

    /// ψₙ(t); exactly 0 outside the support.
    pub fn density(&self, t: f64) -> f64 {
        self.log_density(t).exp()
    }

    /// ln(1 − Ψₙ(t)).
    pub fn log_sf(&self, t: f64) -> f64 {
        if t >= self.sqrt_n {
            return f64::NEG_INFINITY;
        }
        if t <= -self.sqrt_n {
            return 0.0;
        }
        if t > 0.0 {
            special::ln_sym_beta_upper(0.5 * (self.n as f64 - 1.0), t / self.sqrt_n)
        } else if t == 0.0 {
            -std::f64::consts::LN_2
        } else {
            (-self.sf(-t)).ln_1p()
        }
    }

    /// 1 − Ψₙ(t).
    pub fn sf(&self, t: f64) -> f64 {
        if t < 0.0 {
            return 1.0 - self.sf(-t);
        }
        self.log_sf(t).exp()
    }

    /// Ψₙ(t).
    pub fn cdf(&self, t: f64) -> f64 {
        self.sf(-t)
    }

    /// 1 − Ψₙ(t) by the chosen method.
    pub fn sf_with(&self, method: TailMethod, t: f64) -> f64 {
        match method {
            TailMethod::IncompleteBeta => self.sf(t),
            TailMethod::AdaptiveSimpson => self.sf_quadrature(t),
        }
    }

    fn sf_quadrature(&self, t: f64) -> f64 {
        if t >= self.sqrt_n {
            return 0.0;
        }
        if t <= -self.sqrt_n {
            return 1.0;
        }
        if t < 0.0 {
            return 1.0 - self.sf_quadrature(-t);
        }
        // Integrate the shorter side: [0, t] against ½ near the center.
        if t < 1.0 {
            let mass = quad::simpson(|s| self.density(s), 0.0, t, 1e-13).value;
            return 0.5 - mass;
        }
        quad::simpson(|s| self.density(s), t, self.sqrt_n, 1e-13).value
    }

    /// d/dt ln ψₙ(t) = −(n − 3) t / (n − t²).
    pub fn log_slope(&self, t: f64) -> Result<f64> {
        let nf = self.n as f64;
        if t * t >= nf {
            return Err(invalid(format!("log-slope needs |t| < √n, got t = {t}, n = {}", self.n)));
        }
        if self.n == 3 {
            return Ok(0.0);
        }
        Ok(-(nf - 3.0) * t / (nf - t * t))
    }

    /// ln(ψₙ(t)/ψₙ((1+u)t)) / (u t²).
    ///
    /// Requires t > 0, u ∈ [0, 1] and 2(1+u)²t² < n. At u = 0 the
    /// continuous limit (n − 3)/(n − t²) is returned.
    pub fn shift_ratio(&self, t: f64, u: f64) -> Result<f64> {
        let nf = self.n as f64;
        if !(t > 0.0) || !(0.0..=1.0).contains(&u) {
            return Err(invalid(format!("shift ratio needs t > 0 and u in [0,1], got t={t}, u={u}")));
        }
        let s = (1.0 + u) * t;
        if 2.0 * s * s >= nf {
            return Err(invalid(format!(
                "shift ratio needs 2(1+u)²t² < n, got {} ≥ {}",
                2.0 * s * s,
                self.n
            )));
        }
        let e = self.exponent();
        if u == 0.0 {
            return Ok((nf - 3.0) / (nf - t * t));
        }
        let lr = e * ((-t * t / nf).ln_1p() - (-s * s / nf).ln_1p());
        Ok(lr / (u * t * t))
    }

    /// Tail-to-density ratio (1 − Ψₙ(t)) / (t⁻¹ψₙ(t)), computed in log space.
    pub fn tail_density_ratio(&self, t: f64) -> f64 {
        (self.log_sf(t) - self.log_density(t) + t.ln()).exp()
    }
}

fn marginal(n: usize) -> Result<SphericalMarginal> {
    SphericalMarginal::new(n)
}

fn check_finite(t: f64) -> Result<()> {
    if t.is_finite() {
        Ok(())
    } else {
        Err(invalid(format!("t must be finite, got {t}")))
    }
}

/// ln ψₙ(t)
pub fn sph_log_density(n: usize, t: f64) -> Result<f64> {
    check_finite(t)?;
    Ok(marginal(n)?.log_density(t))
}

/// ψₙ(t)
pub fn sph_density(n: usize, t: f64) -> Result<f64> {
    check_finite(t)?;
    Ok(marginal(n)?.density(t))
}

/// Ψₙ(t)
pub fn sph_cdf(n: usize, t: f64) -> Result<f64> {
    Ok(marginal(n)?.cdf(t))
}

/// 1 − Ψₙ(t)
pub fn sph_tail(n: usize, t: f64) -> Result<f64> {
    Ok(marginal(n)?.sf(t))
}

/// ln(1 − Ψₙ(t))
pub fn sph_log_tail(n: usize, t: f64) -> Result<f64> {
    Ok(marginal(n)?.log_sf(t))
}

pub fn sph_log_slope(n: usize, t: f64) -> Result<f64> {
    marginal(n)?.log_slope(t)
}

pub fn sph_shift_ratio(n: usize, t: f64, u: f64) -> Result<f64> {
    marginal(n)?.shift_ratio(t, u)
}

pub fn gauss_density(t: f64) -> f64 {
    special::normal_pdf(t)
}

pub fn gauss_cdf(t: f64) -> f64 {
    special::normal_cdf(t)
}

pub fn gauss_tail(t: f64) -> f64 {
    special::normal_sf(t)
}

pub fn gauss_log_tail(t: f64) -> f64 {
    normal_ln_sf(t)
}

/// The two sides of 1 − Φ(t − s) ≤ (1 − Φ(t))·e^{st}.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ShiftBound {
    pub lhs: f64,
    pub rhs: f64,
}

impl ShiftBound {
    pub fn holds(&self) -> bool {
        self.lhs <= self.rhs * (1.0 + 1e-12)
    }

    pub fn ratio(&self) -> f64 {
        self.lhs / self.rhs
    }
}

/// Evaluates both sides of the Gaussian shift inequality.
pub fn gauss_shift_bound(t: f64, s: f64) -> Result<ShiftBound> {
    if !(t > 0.0) || !(s >= 0.0) {
        return Err(invalid(format!("shift bound needs t > 0, s ≥ 0, got t={t}, s={s}")));
    }
    Ok(ShiftBound { lhs: special::normal_sf(t - s), rhs: special::normal_sf(t) * (s * t).exp() })
}

/// (1 − Φ(t)) · t · e^{t²/2}, the constant needed in 1 − Φ(t) ≤ C t⁻¹ e^{−t²/2}.
pub fn gauss_mills_constant(t: f64) -> f64 {
    (normal_ln_sf(t) + t.ln() + 0.5 * t * t).exp()
}

/// sup of lhs/rhs of [`gauss_shift_bound`] over t = t_max·i/points and
/// s = t·j/points, i, j ≤ points.
pub fn normal_shift_envelope(t_max: f64, points: usize) -> Envelope {
    let mut env = Envelope { min: f64::INFINITY, max: 0.0, cells: 0 };
    for i in 1..=points {
        let t = t_max * i as f64 / points as f64;
        for j in 0..=points {
            let s = t * j as f64 / points as f64;
            let b = ShiftBound { lhs: special::normal_sf(t - s), rhs: special::normal_sf(t) * (s * t).exp() };
            let r = b.ratio();
            env.min = env.min.min(r);
            env.max = env.max.max(r);
            env.cells += 1;
        }
    }
    env
}

/// One row of [`sph_gauss_report`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SphGaussRow {
    pub t: f64,
    /// ψₙ(t)/φ(t)
    pub density_ratio: f64,
    /// (1 − Ψₙ(t))/(1 − Φ(t))
    pub tail_ratio: f64,
    /// D(n, t) = ln(ψₙ(t)/φ(t)) + t⁴/(4n)
    pub fourth_order: f64,
    /// 2(t²/n + t⁶/n²), the envelope |D| is checked against
    pub fourth_order_bound: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SphGaussReport {
    pub n: usize,
    pub rows: Vec<SphGaussRow>,
}

impl SphGaussReport {
    pub fn fourth_order_law_holds(&self) -> bool {
        self.rows.iter().all(|r| r.fourth_order.abs() <= r.fourth_order_bound)
    }
}

/// Compares ψₙ against φ on `t_grid ⊂ (0, ¼√n)`.
pub fn sph_gauss_report(n: usize, t_grid: &[f64]) -> Result<SphGaussReport> {
    let m = marginal(n)?;
    let edge = 0.25 * m.support_edge();
    let nf = n as f64;
    let rows = t_grid
        .iter()
        .map(|&t| {
            if !(t > 0.0 && t < edge) {
                return Err(invalid(format!("t = {t} outside (0, ¼√n) = (0, {edge})")));
            }
            let ln_ratio = m.log_density(t) - normal_ln_pdf(t);
            Ok(SphGaussRow {
                t,
                density_ratio: ln_ratio.exp(),
                tail_ratio: (m.log_sf(t) - normal_ln_sf(t)).exp(),
                fourth_order: ln_ratio + t.powi(4) / (4.0 * nf),
                fourth_order_bound: 2.0 * (t * t / nf + t.powi(6) / (nf * nf)),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SphGaussReport { n, rows })
}

/// D(n, t) = ln(ψₙ(t)/φ(t)) + t⁴/(4n) without the grid restriction of
/// [`sph_gauss_report`].
pub fn fourth_order_diagnostic(n: usize, t: f64) -> Result<f64> {
    let m = marginal(n)?;
    Ok(m.log_density(t) - normal_ln_pdf(t) + t.powi(4) / (4.0 * n as f64))
}

/// sup over `points` equally spaced in (0, t_max] of |ψₙ(t)/φ(t) − 1|.
pub fn sup_density_deviation(n: usize, t_max: f64, points: usize) -> Result<f64> {
    let m = marginal(n)?;
    Ok((1..=points)
        .map(|i| {
            let t = t_max * i as f64 / points as f64;
            ((m.log_density(t) - normal_ln_pdf(t)).exp() - 1.0).abs()
        })
        .fold(0.0, f64::max))
}

/// Result of an envelope scan.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Envelope {
    pub min: f64,
    pub max: f64,
    /// number of (n, t[, u]) cells scanned
    pub cells: usize,
}

impl Envelope {
    /// max(sup, 1/inf): the two-sided constant C with values in [1/C, C].
    pub fn two_sided_constant(&self) -> f64 {
        self.max.max(1.0 / self.min)
    }
}

/// Scans (1 − Ψₙ(t))/(t⁻¹ψₙ(t)) over n ∈ `dims`, t ∈ [1, √(n/8)] with
/// `points` grid points per dimension (dimensions with √(n/8) < 1 are skipped).
pub fn sphder_envelope(dims: &[usize], points: usize) -> Result<Envelope> {
    let mut env = Envelope { min: f64::INFINITY, max: 0.0, cells: 0 };
    for &n in dims {
        let m = marginal(n)?;
        let hi = (n as f64 / 8.0).sqrt();
        if hi < 1.0 {
            continue;
        }
        for i in 0..points {
            let t = 1.0 + (hi - 1.0) * i as f64 / (points.max(2) - 1) as f64;
            let r = m.tail_density_ratio(t);
            env.min = env.min.min(r);
            env.max = env.max.max(r);
            env.cells += 1;
        }
    }
    Ok(env)
}

/// Scans the normalized log-ratio of [`SphericalMarginal::shift_ratio`] over
/// n ∈ `dims`, u ∈ (0, 1], and t up to the limit 2(1+u)²t² < n.
pub fn logder_envelope(dims: &[usize], points: usize) -> Result<Envelope> {
    let mut env = Envelope { min: f64::INFINITY, max: 0.0, cells: 0 };
    for &n in dims {
        let m = marginal(n)?;
        for j in 1..=points {
            let u = j as f64 / points as f64;
            // stay strictly inside the precondition
            let t_hi = 0.999 * (n as f64 / 2.0).sqrt() / (1.0 + u);
            for i in 1..=points {
                let t = t_hi * i as f64 / points as f64;
                let r = m.shift_ratio(t, u)?;
                env.min = env.min.min(r);
                env.max = env.max.max(r);
                env.cells += 1;
            }
        }
    }
    Ok(env)
}

#[cfg(test)]
mod tests {
    use super::*;

    const INV_2_SQRT3: f64 = 0.288_675_134_594_812_9;

    #[test]
    fn rejects_small_dimension() {
        assert!(matches!(SphericalMarginal::new(2), Err(Error::Dimension { n: 2, min: 3 })));
        assert!(sph_tail(1, 0.0).is_err());
    }

    #[test]
    fn n3_is_uniform_including_boundary() {
        let m = SphericalMarginal::new(3).unwrap();
        for &t in &[-3f64.sqrt(), -1.0, 0.0, 0.5, 1.0, 3f64.sqrt()] {
            assert!((m.density(t) - INV_2_SQRT3).abs() < 1e-15, "t={t}");
        }
        assert_eq!(m.density(1.7321), 0.0);
        assert!((m.log_density(1.0) + 1.242_453_324_894_000_2).abs() < 1e-14);
        assert!((m.cdf(1.0) - (0.5 + INV_2_SQRT3)).abs() < 1e-14);
    }

    #[test]
    fn log_density_examples() {
        assert_eq!(sph_log_density(100, 10.0).unwrap(), f64::NEG_INFINITY);
        assert_eq!(sph_density(4, 2.0).unwrap(), 0.0);
        // Γ(2.5)/(√(5π)Γ(2)) = 3/(4√5)
        let expect = (3.0 / (4.0 * 5f64.sqrt())).ln();
        assert!((sph_log_density(5, 0.0).unwrap() - expect).abs() < 1e-14);
        assert!((sph_density(1000, 0.0).unwrap() - 0.398_642_986_394_468_65).abs() < 1e-14);
        assert!((sph_density(1000, 0.0).unwrap() - gauss_density(0.0)).abs() < 1e-3);
        assert!(sph_log_density(5, f64::NAN).is_err());
    }

    #[test]
    fn tail_against_high_precision_values() {
        // (n, t, 1 − Ψₙ(t), ln(1 − Ψₙ(t))) from 40-digit quadrature
        let cases: [(usize, f64, f64, f64); 10] = [
            (3, 1.0, 0.211_324_865_405_187_1, -1.554_358_683_076_436),
            (17, 0.5, 0.315_850_120_737_901_8, -1.152_487_479_374_078_8),
            (64, 2.0, 0.022_296_574_391_727_234, -3.803_322_227_036_765_5),
            (64, 5.0, 1.311_065_106_172_931_6e-8, -18.149_840_878_942_753),
            (256, 4.0, 2.530_318_424_462_158_6e-5, -10.584_580_310_679_229),
            (1000, 3.0, 0.001_329_966_685_679_688, -6.622_601_385_423_327),
            (4096, 12.0, 4.949_668_477_218_042e-34, -76.688_572_561_759_22),
            (10_000_000, 3.0, 0.001_349_896_037_298_425_5, -6.607_727_698_905_749),
            (10_000_000, 30.0, 4.808_563_389_956_351e-198, -454.341_450_044_841_35),
            (1_000_000, 0.001, 0.499_601_058_085_295_5, -0.693_945_382_866_074_2),
        ];
        for (n, t, tail, ln_tail) in cases {
            let m = SphericalMarginal::new(n).unwrap();
            let got = m.sf(t);
            assert!((got - tail).abs() <= 1e-12, "n={n} t={t}: {got} vs {tail}");
            assert!((got / tail - 1.0).abs() <= 1e-10, "n={n} t={t} relative");
            let gl = m.log_sf(t);
            assert!((gl - ln_tail).abs() <= 1e-10 * ln_tail.abs().max(1.0), "n={n} t={t} log");
        }
    }

    #[test]
    fn log_tail_beyond_double_range() {
        let m = SphericalMarginal::new(4096).unwrap();
        let got = m.log_sf(60.0);
        assert!((got + 4_327.675_272_074_955_8).abs() < 1e-8, "{got}");
        assert_eq!(m.sf(60.0), 0.0);
        assert!((m.log_sf(7.9) - SphericalMarginal::new(64).unwrap().log_sf(7.9)).abs() > 1.0);
        let m64 = SphericalMarginal::new(64).unwrap();
        assert!((m64.log_sf(7.9) + 119.379_482_395_481_9).abs() < 1e-9);
    }

    #[test]
    fn large_dimension_is_finite() {
        let m = SphericalMarginal::new(10_000_000).unwrap();
        assert!((m.density(0.0) - 0.398_942_250_480_760_8).abs() < 1e-15);
        assert!((m.log_density(100.0) + 5_003.419_105_775_372).abs() < 1e-9);
    }

    #[test]
    fn support_endpoints() {
        for n in [3usize, 4, 17, 256] {
            let m = SphericalMarginal::new(n).unwrap();
            let e = m.support_edge();
            assert_eq!(m.cdf(e), 1.0);
            assert_eq!(m.cdf(-e), 0.0);
            assert_eq!(m.cdf(0.0), 0.5);
        }
    }

    #[test]
    fn quadrature_path_matches_beta_path() {
        for &n in &[3usize, 5, 16, 64, 257] {
            let m = SphericalMarginal::new(n).unwrap();
            for &t in &[0.1, 0.7, 1.5, 2.5] {
                if t >= m.support_edge() {
                    continue;
                }
                let a = m.sf_with(TailMethod::IncompleteBeta, t);
                let b = m.sf_with(TailMethod::AdaptiveSimpson, t);
                assert!((a - b).abs() < 1e-12, "n={n} t={t}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn slope_examples() {
        assert_eq!(sph_log_slope(100, 0.0).unwrap(), 0.0);
        assert!((sph_log_slope(100, 3.0).unwrap() + 291.0 / 91.0).abs() < 1e-14);
        assert_eq!(sph_log_slope(3, 1.2).unwrap(), 0.0);
        assert!(sph_log_slope(100, 10.0).is_err());
    }

    #[test]
    fn shift_ratio_domain() {
        assert!(sph_shift_ratio(1000, 2.0, 0.1).is_ok());
        assert!(sph_shift_ratio(50, 1.0, 1.0).unwrap() > 0.0);
        // 2·4·16 = 128 ≥ 50
        assert!(sph_shift_ratio(50, 4.0, 1.0).is_err());
        assert!(sph_shift_ratio(50, -1.0, 0.5).is_err());
        assert!(sph_shift_ratio(50, 1.0, 1.5).is_err());
        let lim = sph_shift_ratio(1000, 1e-4, 0.0).unwrap();
        assert!((lim - 997.0 / 1000.0).abs() < 1e-9);
    }

    #[test]
    fn gauss_shift_examples() {
        let b = gauss_shift_bound(1.3, 0.0).unwrap();
        assert_eq!(b.lhs, b.rhs);
        let b = gauss_shift_bound(2.0, 0.5).unwrap();
        // lhs = 1 − Φ(1.5) ≈ 0.0668 exceeds rhs = (1 − Φ(2))·e ≈ 0.0618
        assert!((b.lhs - 0.066_807_201_268_858_06).abs() < 1e-14);
        assert!((b.rhs - 0.061_840_9).abs() < 1e-6);
        assert!(!b.holds());
        let b = gauss_shift_bound(5.0, 1.0).unwrap();
        assert!(b.holds());
        assert!(gauss_shift_bound(0.0, 1.0).is_err());
    }

    #[test]
    fn report_rejects_outside_grid() {
        assert!(sph_gauss_report(64, &[2.0]).is_err());
        assert!(sph_gauss_report(64, &[0.0]).is_err());
        let r = sph_gauss_report(64, &[0.01]).unwrap();
        let m = SphericalMarginal::new(64).unwrap();
        let c = m.density(0.0) / gauss_density(0.0);
        assert!((r.rows[0].density_ratio - c).abs() < 1e-2, "{:?} {c}", r.rows[0]);
        // both tails are ½ at the origin, so the tail ratio tends to 1 instead
        assert!((r.rows[0].tail_ratio - 1.0).abs() < 1e-3);
        let r = sph_gauss_report(256, &[3.99]).unwrap();
        assert!(r.rows[0].tail_ratio < 1.0);
    }
}
