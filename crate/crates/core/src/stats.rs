//! Small statistics toolkit: Kolmogorov–Smirnov, least squares, exact
//! binomial intervals.

use serde::{Deserialize, Serialize};

use crate::special::{beta_inc_reg, ln_gamma};

/// Two-sided KS distance sup|F̂ − F| of a sample against a continuous CDF.
/// The sample is sorted in place.
pub fn ks_statistic<F: Fn(f64) -> f64>(samples: &mut [f64], cdf: F) -> f64 {
    samples.sort_by(f64::total_cmp);
    let n = samples.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in samples.iter().enumerate() {
        let f = cdf(x);
        d = d.max((i + 1) as f64 / n - f).max(f - i as f64 / n);
    }
    d
}

/// Two-sample KS distance; both samples are sorted in place.
pub fn ks_two_sample(a: &mut [f64], b: &mut [f64]) -> f64 {
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut d: f64 = 0.0;
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    d
}

/// Critical value of the two-sample statistic at level `alpha`.
pub fn ks_two_sample_critical(alpha: f64, na: usize, nb: usize) -> f64 {
    let ne = (na * nb) as f64 / (na + nb) as f64;
    ks_critical(alpha, 1) / ne.sqrt()
}

/// Asymptotic Kolmogorov survival function P(√N·D > λ).
pub fn kolmogorov_sf(lambda: f64) -> f64 {
    if lambda <= 0.0 {
        return 1.0;
    }
    if lambda < 0.3 {
        return 1.0;
    }
    let mut s = 0.0;
    for k in 1..=100 {
        let k = k as f64;
        let term = (-2.0 * k * k * lambda * lambda).exp();
        s += if k as i64 % 2 == 1 { term } else { -term };
        if term < 1e-18 {
            break;
        }
    }
    (2.0 * s).clamp(0.0, 1.0)
}

/// Asymptotic p-value with the Stephens small-sample correction.
pub fn ks_pvalue(d: f64, n: usize) -> f64 {
    let sn = (n as f64).sqrt();
    kolmogorov_sf((sn + 0.12 + 0.11 / sn) * d)
}

/// Critical value of D at level `alpha` (asymptotic, bisection on the
/// Kolmogorov law).
pub fn ks_critical(alpha: f64, n: usize) -> f64 {
    let (mut lo, mut hi) = (0.3, 5.0);
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if kolmogorov_sf(mid) > alpha {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi) / (n as f64).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
    /// max |residual|
    pub max_residual: f64,
}

/// Ordinary least squares y ≈ intercept + slope·x.
pub fn linear_regression(x: &[f64], y: &[f64]) -> Option<LinearFit> {
    let n = x.len();
    if n < 2 || n != y.len() {
        return None;
    }
    let nf = n as f64;
    let mx = x.iter().sum::<f64>() / nf;
    let my = y.iter().sum::<f64>() / nf;
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for (&a, &b) in x.iter().zip(y) {
        sxx += (a - mx) * (a - mx);
        sxy += (a - mx) * (b - my);
        syy += (b - my) * (b - my);
    }
    if sxx == 0.0 {
        return None;
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let mut ss_res = 0.0;
    let mut max_residual: f64 = 0.0;
    for (&a, &b) in x.iter().zip(y) {
        let r = b - intercept - slope * a;
        ss_res += r * r;
        max_residual = max_residual.max(r.abs());
    }
    let r2 = if syy > 0.0 { (1.0 - ss_res / syy).clamp(0.0, 1.0) } else { 1.0 };
    Some(LinearFit { slope, intercept, r2, max_residual })
}

/// Weighted least squares y ≈ intercept + slope·x; returns (fit, weighted SSE).
pub fn weighted_regression(x: &[f64], y: &[f64], w: &[f64]) -> Option<(LinearFit, f64)> {
    let sw: f64 = w.iter().sum();
    if x.len() < 2 || sw <= 0.0 {
        return None;
    }
    let mx = x.iter().zip(w).map(|(a, b)| a * b).sum::<f64>() / sw;
    let my = y.iter().zip(w).map(|(a, b)| a * b).sum::<f64>() / sw;
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for ((&a, &b), &wi) in x.iter().zip(y).zip(w) {
        sxx += wi * (a - mx) * (a - mx);
        sxy += wi * (a - mx) * (b - my);
        syy += wi * (b - my) * (b - my);
    }
    if sxx <= 0.0 {
        return None;
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let mut sse = 0.0;
    let mut max_residual: f64 = 0.0;
    for ((&a, &b), &wi) in x.iter().zip(y).zip(w) {
        let r = b - intercept - slope * a;
        sse += wi * r * r;
        max_residual = max_residual.max(r.abs());
    }
    let r2 = if syy > 0.0 { (1.0 - sse / syy).clamp(0.0, 1.0) } else { 1.0 };
    Some((LinearFit { slope, intercept, r2, max_residual }, sse))
}

/// Exact (Clopper–Pearson) two-sided interval for k successes in n trials.
pub fn clopper_pearson(k: u64, n: u64, level: f64) -> (f64, f64) {
    let a = 0.5 * (1.0 - level);
    let (kf, nf) = (k as f64, n as f64);
    // lower: P(Bin ≥ k | p) = I_p(k, n−k+1) = a
    let lower = if k == 0 { 0.0 } else { bisect(|p| beta_inc_reg(kf, nf - kf + 1.0, p) - a) };
    // upper: P(Bin ≤ k | p) = 1 − I_p(k+1, n−k) = a
    let upper = if k == n { 1.0 } else { bisect(|p| a - (1.0 - beta_inc_reg(kf + 1.0, nf - kf, p))) };
    (lower, upper)
}

// root of an increasing function on [0, 1]
fn bisect<F: Fn(f64) -> f64>(f: F) -> f64 {
    let (mut lo, mut hi) = (0.0, 1.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-15 {
            break;
        }
    }
    0.5 * (lo + hi)
}

/// ln of the binomial pmf C(n,k) pᵏ (1−p)ⁿ⁻ᵏ.
pub fn binomial_ln_pmf(k: u64, n: u64, p: f64) -> f64 {
    let (kf, nf) = (k as f64, n as f64);
    let ln_c = ln_gamma(nf + 1.0) - ln_gamma(kf + 1.0) - ln_gamma(nf - kf + 1.0);
    let a = if k == 0 { 0.0 } else { kf * p.ln() };
    let b = if k == n { 0.0 } else { (nf - kf) * (-p).ln_1p() };
    ln_c + a + b
}

/// Sample mean and (unbiased) variance.
pub fn mean_var(x: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let m = x.iter().sum::<f64>() / n;
    let v = x.iter().map(|a| (a - m) * (a - m)).sum::<f64>() / (n - 1.0).max(1.0);
    (m, v)
}
