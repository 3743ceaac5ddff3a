//! The Laplace-type integral I(K; L) = ∫₀¹ exp(Ku − Luᵝ) du.
//!
//! It controls the middle error term of the average-marginal approximation
//! (K ~ t², L ~ nᵅ). For β > 1 the exponent E(u) = Ku − Luᵝ is concave with
//! interior maximum u₀ = (K/βL)^{1/(β−1)}; for β ≤ 1 it is convex and, once
//! K/L < ½, dominated by −Luᵝ/2, giving the explicit bound
//! K·I ≤ 2^{1/β} Γ(1/β + 1) · K/L.

use serde::{Deserialize, Serialize};

use crate::special::ln_gamma;
use crate::{invalid, quad, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LaplaceParams {
    pub k: f64,
    pub l: f64,
    pub beta: f64,
}

impl LaplaceParams {
    /// K ≥ 0, L ≥ 0, β > 0. L = 0 is accepted for the integral itself
    /// (integrand e^{Ku}); the regime checks require L > 0.
    pub fn new(k: f64, l: f64, beta: f64) -> Result<Self> {
        if !(k >= 0.0 && k.is_finite()) || !(l >= 0.0 && l.is_finite()) || !(beta > 0.0) {
            return Err(invalid(format!("need K ≥ 0, L ≥ 0, β > 0; got K={k}, L={l}, β={beta}")));
        }
        Ok(Self { k, l, beta })
    }

    /// E(u) = Ku − Luᵝ
    pub fn exponent(&self, u: f64) -> f64 {
        self.k * u - self.l * u.powf(self.beta)
    }

    /// K^{max(β,1)}/L
    pub fn regime_scale(&self) -> f64 {
        self.k.powf(self.beta.max(1.0)) / self.l
    }
}

/// I(K; L) by adaptive Gauss–Kronrod. Breakpoints are placed geometrically
/// towards u = 0 and towards the maximizer u₀ (β > 1), so boundary layers of
/// width down to 2⁻¹⁰⁰ are seen by the first pass.
pub fn integral_i(p: &LaplaceParams) -> f64 {
    let f = |u: f64| p.exponent(u).exp();
    let mut anchors = vec![0.0];
    if p.beta > 1.0 && p.k > 0.0 && p.l > 0.0 {
        let u0 = (p.k / (p.beta * p.l)).powf(1.0 / (p.beta - 1.0));
        if u0 > 0.0 && u0 < 1.0 {
            anchors.push(u0);
        }
    }
    let mut points = vec![0.0, 1.0];
    for &a in &anchors {
        points.push(a);
        let mut h = 0.5;
        for _ in 0..100 {
            for x in [a - h, a + h] {
                if x > 0.0 && x < 1.0 {
                    points.push(x);
                }
            }
            h *= 0.5;
        }
    }
    points.sort_by(f64::total_cmp);
    points.dedup();
    quad::gauss_kronrod_points(f, &points, 1e-300, 1e-13).value
}

/// (e^{K−L} − 1)/(K − L), the β = 1 closed form (1 when K = L).
pub fn integral_i_beta1(k: f64, l: f64) -> f64 {
    let d = k - l;
    if d == 0.0 {
        1.0
    } else {
        d.exp_m1() / d
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Maximizer {
    /// (K/βL)^{1/(β−1)}
    pub u0: f64,
    /// E(u₀) = C_β (Kᵝ/L)^{1/(β−1)}
    pub value: f64,
    /// C_β = β^{−1/(β−1)} − β^{−β/(β−1)}
    pub c_beta: f64,
    /// u₀ ≥ 1: the maximum over [0, 1] sits at the right endpoint instead
    pub on_boundary: bool,
}

/// Stationary point of E(u) = Ku − Luᵝ for β > 1, K > 0.
pub fn maximizer(p: &LaplaceParams) -> Result<Maximizer> {
    if !(p.beta > 1.0) {
        return Err(invalid(format!("maximizer needs β > 1, got {}", p.beta)));
    }
    if !(p.k > 0.0) || !(p.l > 0.0) {
        return Err(invalid(format!("maximizer needs K > 0 and L > 0, got K={}, L={}", p.k, p.l)));
    }
    let b = p.beta;
    let inv = 1.0 / (b - 1.0);
    let u0 = (p.k / (b * p.l)).powf(inv);
    let c_beta = b.powf(-inv) - b.powf(-b * inv);
    let value = c_beta * (p.k.powf(b) / p.l).powf(inv);
    Ok(Maximizer { u0, value, c_beta, on_boundary: u0 >= 1.0 })
}

/// 2^{1/β} Γ(1/β + 1), the explicit constant for β ≤ 1.
pub fn case2_constant(beta: f64) -> f64 {
    ((1.0 / beta) * std::f64::consts::LN_2 + ln_gamma(1.0 / beta + 1.0)).exp()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundRecord {
    pub params: LaplaceParams,
    /// K·I(K; L)
    pub lhs: f64,
    /// K^{max(β,1)}/L
    pub rhs_scale: f64,
    pub ratio: f64,
}

/// K·I against K^{max(β,1)}/L inside the regime K^{max(β,1)}/L < ½.
pub fn bound_check(p: &LaplaceParams) -> Result<BoundRecord> {
    if !(p.k > 0.0) || !(p.l > 0.0) {
        return Err(invalid(format!("bound check needs K > 0 and L > 0, got K={}, L={}", p.k, p.l)));
    }
    let scale = p.regime_scale();
    if !(scale < 0.5) {
        return Err(Error::OutsideRegime {
            what: "Laplace-integral bound",
            detail: format!("K^max(β,1)/L = {scale} ≥ 1/2"),
        });
    }
    let lhs = p.k * integral_i(p);
    Ok(BoundRecord { params: *p, lhs, rhs_scale: scale, ratio: lhs / scale })
}

/// Summary of a (K, L) grid scan at fixed β.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanSummary {
    pub beta: f64,
    pub cells: usize,
    pub sup_ratio: f64,
    pub argmax: (f64, f64),
}

/// sup of K·I/(K^{max(β,1)}/L) over grid cells inside the regime.
pub fn scan_ratio(beta: f64, ks: &[f64], ls: &[f64]) -> Result<ScanSummary> {
    let mut s = ScanSummary { beta, cells: 0, sup_ratio: 0.0, argmax: (f64::NAN, f64::NAN) };
    for &k in ks {
        for &l in ls {
            let p = LaplaceParams::new(k, l, beta)?;
            match bound_check(&p) {
                Ok(rec) => {
                    s.cells += 1;
                    if rec.ratio > s.sup_ratio {
                        s.sup_ratio = rec.ratio;
                        s.argmax = (k, l);
                    }
                }
                Err(Error::OutsideRegime { .. }) => {}
                Err(e) => return Err(e),
            }
        }
    }
    Ok(s)
}
