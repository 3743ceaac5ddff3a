//! Average-marginal transform: from the radial law of |X|/√n to the average
//! marginal of X over uniformly random directions.
//!
//! For μ* the law of R = |X|/√n (no atom at 0):
//!
//! * 1 − F^av(t) = E[1 − Ψₙ(t/R)]
//! * f^av(t)     = E[R⁻¹ ψₙ(t/R)]
//!
//! Atomic and empirical radial laws make both expectations finite weighted
//! sums, so the transform is exact up to the accuracy of Ψₙ.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::concentration::ConcentrationProfile;
use crate::refdist::{SphericalMarginal, SPHDER_CONSTANT};
use crate::{quad, Error, Result};

const WEIGHT_TOL: f64 = 1e-12;
const PAR_CHUNK: usize = 4096;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RadialRepr {
    Atom { r: f64 },
    /// (radius, weight) pairs, sorted by radius
    Atoms { atoms: Vec<(f64, f64)> },
    /// sorted sample of radii, equal weights
    Empirical { samples: Vec<f64> },
}

/// Normalized radial projection μ*(r) = P{|X| ≤ √n·r}.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialDistribution {
    n: usize,
    repr: RadialRepr,
}

fn check_radius(r: f64) -> Result<()> {
    if r.is_finite() && r > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidRadial(format!("radius must be positive and finite, got {r}")))
    }
}

impl RadialDistribution {
    pub fn atom(n: usize, r: f64) -> Result<Self> {
        SphericalMarginal::new(n)?;
        check_radius(r)?;
        Ok(Self { n, repr: RadialRepr::Atom { r } })
    }

    pub fn atoms(n: usize, mut atoms: Vec<(f64, f64)>) -> Result<Self> {
        SphericalMarginal::new(n)?;
        if atoms.is_empty() {
            return Err(Error::InvalidRadial("no atoms".into()));
        }
        let mut total = 0.0;
        for &(r, w) in &atoms {
            check_radius(r)?;
            if !(w >= 0.0) || !w.is_finite() {
                return Err(Error::InvalidRadial(format!("negative or non-finite weight {w}")));
            }
            total += w;
        }
        if (total - 1.0).abs() > WEIGHT_TOL {
            return Err(Error::InvalidRadial(format!("weights sum to {total}, not 1")));
        }
        atoms.sort_by(|a, b| a.0.total_cmp(&b.0));
        Ok(Self { n, repr: RadialRepr::Atoms { atoms } })
    }

    pub fn empirical(n: usize, mut samples: Vec<f64>) -> Result<Self> {
        SphericalMarginal::new(n)?;
        if samples.is_empty() {
            return Err(Error::InvalidRadial("empty sample".into()));
        }
        for &r in &samples {
            check_radius(r)?;
        }
        samples.sort_by(f64::total_cmp);
        Ok(Self { n, repr: RadialRepr::Empirical { samples } })
    }

    /// Mixture a·self + (1 − a)·other as an atomic law.
    pub fn mixture(&self, a: f64, other: &Self) -> Result<Self> {
        if self.n != other.n {
            return Err(Error::InvalidRadial(format!("dimension mismatch {} vs {}", self.n, other.n)));
        }
        if !(0.0..=1.0).contains(&a) {
            return Err(Error::InvalidRadial(format!("mixture weight {a} outside [0,1]")));
        }
        let mut atoms: Vec<(f64, f64)> = self.weighted().map(|(r, w)| (r, a * w)).collect();
        atoms.extend(other.weighted().map(|(r, w)| (r, (1.0 - a) * w)));
        // re-normalize rounding drift from the products
        let total: f64 = atoms.iter().map(|p| p.1).sum();
        atoms.iter_mut().for_each(|p| p.1 /= total);
        Self::atoms(self.n, atoms)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn repr(&self) -> &RadialRepr {
        &self.repr
    }

    pub fn len(&self) -> usize {
        match &self.repr {
            RadialRepr::Atom { .. } => 1,
            RadialRepr::Atoms { atoms } => atoms.len(),
            RadialRepr::Empirical { samples } => samples.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// (radius, weight) pairs in ascending radius.
    pub fn weighted(&self) -> Box<dyn Iterator<Item = (f64, f64)> + '_> {
        match &self.repr {
            RadialRepr::Atom { r } => Box::new(std::iter::once((*r, 1.0))),
            RadialRepr::Atoms { atoms } => Box::new(atoms.iter().copied()),
            RadialRepr::Empirical { samples } => {
                let w = 1.0 / samples.len() as f64;
                Box::new(samples.iter().map(move |&r| (r, w)))
            }
        }
    }

    /// μ*(r)
    pub fn cdf(&self, r: f64) -> f64 {
        match &self.repr {
            RadialRepr::Atom { r: r0 } => {
                if r >= *r0 {
                    1.0
                } else {
                    0.0
                }
            }
            RadialRepr::Atoms { atoms } => {
                let k = atoms.partition_point(|p| p.0 <= r);
                atoms[..k].iter().map(|p| p.1).sum::<f64>().min(1.0)
            }
            RadialRepr::Empirical { samples } => {
                samples.partition_point(|&s| s <= r) as f64 / samples.len() as f64
            }
        }
    }

    pub fn mean(&self) -> f64 {
        self.weighted().map(|(r, w)| r * w).sum()
    }

    /// Points where μ* jumps, ascending.
    fn jumps(&self) -> Vec<f64> {
        let mut v: Vec<f64> = self.weighted().map(|p| p.0).collect();
        v.dedup();
        v
    }

    /// Weighted mean and Monte Carlo standard error of g(r) over μ*.
    /// Empirical samples give the standard error of the sample mean, atomic
    /// laws give 0.
    fn expect<G: Fn(f64) -> f64 + Sync>(&self, g: G) -> (f64, f64) {
        match &self.repr {
            RadialRepr::Atom { r } => (g(*r), 0.0),
            RadialRepr::Atoms { atoms } => (atoms.iter().map(|&(r, w)| w * g(r)).sum(), 0.0),
            RadialRepr::Empirical { samples } => {
                let partial: Vec<(f64, f64)> = samples
                    .par_chunks(PAR_CHUNK)
                    .map(|c| {
                        c.iter().fold((0.0, 0.0), |(s, s2), &r| {
                            let v = g(r);
                            (s + v, s2 + v * v)
                        })
                    })
                    .collect();
                let (s, s2) = partial.iter().fold((0.0, 0.0), |a, p| (a.0 + p.0, a.1 + p.1));
                let m = samples.len() as f64;
                let mean = s / m;
                let var = if m > 1.0 { ((s2 - m * mean * mean) / (m - 1.0)).max(0.0) } else { 0.0 };
                (mean, (var / m).sqrt())
            }
        }
    }
}

/// Average-marginal tail 1 − F^av(t).
pub fn avg_tail(radial: &RadialDistribution, t: f64) -> Result<f64> {
    Ok(avg_tail_with_stderr(radial, t)?.0)
}

/// Average-marginal tail and the Monte Carlo standard error from the spread
/// of 1 − Ψₙ(t/R) across the empirical sample.
pub fn avg_tail_with_stderr(radial: &RadialDistribution, t: f64) -> Result<(f64, f64)> {
    if !t.is_finite() {
        return Err(crate::invalid(format!("t must be finite, got {t}")));
    }
    let m = SphericalMarginal::new(radial.n)?;
    Ok(radial.expect(|r| m.sf(t / r)))
}

/// Average-marginal density f^av(t).
pub fn avg_density(radial: &RadialDistribution, t: f64) -> Result<f64> {
    Ok(avg_density_with_stderr(radial, t)?.0)
}

pub fn avg_density_with_stderr(radial: &RadialDistribution, t: f64) -> Result<(f64, f64)> {
    if !t.is_finite() {
        return Err(crate::invalid(format!("t must be finite, got {t}")));
    }
    let m = SphericalMarginal::new(radial.n)?;
    Ok(radial.expect(|r| m.density(t / r) / r))
}

/// The three error terms bounding |(1 − F^av(t))/(1 − Ψₙ(t)) − 1|.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErrorTerms {
    /// (1 − μ*(2))·C·t/ψₙ(t)
    pub term1: f64,
    /// ∫₀¹ r⁻² ψₙ(t/r)/ψₙ(t) μ*(r) dr
    pub term2: f64,
    /// ∫₁² r⁻² ψₙ(t/r)/ψₙ(t) (1 − μ*(r)) dr
    pub term3: f64,
}

impl ErrorTerms {
    /// term1 + C t² (term2 + term3)
    pub fn bound(&self, c: f64, t: f64) -> f64 {
        self.term1 + c * t * t * (self.term2 + self.term3)
    }
}

/// Error terms with the recorded tail/density constant [`SPHDER_CONSTANT`].
pub fn error_terms(radial: &RadialDistribution, t: f64) -> Result<ErrorTerms> {
    error_terms_with(radial, t, SPHDER_CONSTANT)
}

/// Error terms with an explicit constant in term1. Requires t > 0 and 8t² < n.
///
/// term2 and term3 integrate r⁻² ψₙ(t/r)/ψₙ(t) against the step function μ*
/// piece by piece (μ* is constant between jumps), each piece by adaptive
/// Simpson with the integrand formed in log space.
pub fn error_terms_with(radial: &RadialDistribution, t: f64, c: f64) -> Result<ErrorTerms> {
    let n = radial.n;
    if !(t > 0.0) || 8.0 * t * t >= n as f64 {
        return Err(crate::invalid(format!("error terms need t > 0 and 8t² < n, got t={t}, n={n}")));
    }
    let m = SphericalMarginal::new(n)?;
    let ln_psi_t = m.log_density(t);
    let g = |r: f64| {
        if r <= 0.0 {
            return 0.0;
        }
        (m.log_density(t / r) - ln_psi_t).exp() / (r * r)
    };
    let term1 = (1.0 - radial.cdf(2.0)) * c * t / ln_psi_t.exp();
    let jumps = radial.jumps();
    let term2 = piecewise(&g, &jumps, 0.0, 1.0, |r| radial.cdf(r));
    let term3 = piecewise(&g, &jumps, 1.0, 2.0, |r| 1.0 - radial.cdf(r));
    Ok(ErrorTerms { term1, term2, term3 })
}

/// ∫_lo^hi g(r)·h(r) dr for h a step function with jumps at `jumps`.
fn piecewise<G, H>(g: &G, jumps: &[f64], lo: f64, hi: f64, h: H) -> f64
where
    G: Fn(f64) -> f64,
    H: Fn(f64) -> f64,
{
    const TOL: f64 = 1e-10;
    let mut edges = vec![lo];
    edges.extend(jumps.iter().copied().filter(|&r| r > lo && r < hi));
    edges.push(hi);
    let width = hi - lo;
    edges
        .windows(2)
        .map(|w| {
            let mid = 0.5 * (w[0] + w[1]);
            let level = h(mid);
            if level == 0.0 {
                return 0.0;
            }
            level * quad::simpson(g, w[0], w[1], TOL * (w[1] - w[0]) / width).value
        })
        .sum()
}

/// Constants of the average-marginal deviation envelope C t^{2max(β,1)} n^{−α},
/// valid while t^{2max(β,1)} n^{−α} < c.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TheoremConstants {
    pub c_regime: f64,
    pub scale: f64,
}

impl Default for TheoremConstants {
    fn default() -> Self {
        Self { c_regime: 0.5, scale: 1.0 }
    }
}

/// Predicted envelope C·t^{2max(β,1)}·n^{−α} for a concentration profile.
pub fn theorem_bound(profile: &ConcentrationProfile, n: usize, t: f64) -> Result<f64> {
    theorem_bound_with(profile, n, t, TheoremConstants::default())
}

pub fn theorem_bound_with(
    profile: &ConcentrationProfile,
    n: usize,
    t: f64,
    k: TheoremConstants,
) -> Result<f64> {
    let x = regime_variable(profile, n, t);
    if !(x < k.c_regime) {
        return Err(Error::OutsideRegime {
            what: "average-marginal theorem",
            detail: format!("t^(2max(β,1))·n^(−α) = {x} ≥ c = {}", k.c_regime),
        });
    }
    Ok(k.scale * x)
}

/// t^{2max(β,1)} n^{−α}
pub fn regime_variable(profile: &ConcentrationProfile, n: usize, t: f64) -> f64 {
    t.abs().powf(2.0 * profile.beta.max(1.0)) * (n as f64).powf(-profile.alpha)
}
