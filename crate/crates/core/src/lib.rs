//! # tailscope
//!
//! Finite-dimension numerics for tail-sensitive Gaussian and spherical
//! approximation of marginals of high-dimensional measures.
//!
//! | Module | Contents |
//! |--------|----------|
//! | [`refdist`] | spherical marginal law ψₙ/Ψₙ and the standard normal, in log space |
//! | [`bv`] | exact average-marginal transform of a radial law, error terms |
//! | [`laplace`] | the integral ∫₀¹ exp(Ku − Luᵝ) du and its regime bounds |
//! | [`samplers`] | sphere, ℓₚ cone/volume and product-law samplers |
//! | [`concentration`] | norm-deviation curves, profile fits, ψ_α tail fits, sphere caps |
//! | [`lab`] | experiment drivers: average tails, direction sweeps |
//!
//! Supporting pieces: [`special`] (log-gamma ratios, incomplete beta, normal
//! tails), [`quad`] (adaptive Simpson and Gauss–Kronrod), [`stats`] (KS test,
//! regression, binomial intervals) and [`io`] (CSV / binary formats).
//!
//! ```
//! use tailscope::refdist::SphericalMarginal;
//!
//! let psi = SphericalMarginal::new(3).unwrap();
//! // n = 3 is Archimedes' uniform law on [−√3, √3]
//! assert!((psi.density(1.0) - 1.0 / (2.0 * 3f64.sqrt())).abs() < 1e-15);
//! ```

// `!(x > 0.0)` also rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use thiserror::Error;

pub mod bv;
pub mod concentration;
pub mod io;
pub mod lab;
pub mod laplace;
pub mod quad;
pub mod refdist;
pub mod samplers;
pub mod special;
pub mod stats;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension n = {n} is below the minimum {min}")]
    Dimension { n: usize, min: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid radial distribution: {0}")]
    InvalidRadial(String),

    #[error("outside {what} regime: {detail}")]
    OutsideRegime { what: &'static str, detail: String },

    #[error("insufficient dynamic range: {0}")]
    InsufficientDynamicRange(String),

    #[error("insufficient tail mass: {0}")]
    InsufficientTailMass(String),

    #[error("tail too deep for N: {0}")]
    TailTooDeep(String),

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
