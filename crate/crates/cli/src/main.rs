//! `tailscope` command-line front end.
//!
//! Exit codes: 0 success, 1 runtime failure, 2 usage error, 3 a verified
//! inequality failed.

// `!(x > 0.0)` also rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod output;
mod verify;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use tailscope::samplers::Exponent;

/// Input or flag problem detected before (or instead of) doing the work.
#[derive(Debug)]
pub struct Usage(pub String);

impl std::fmt::Display for Usage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

#[derive(Debug, Parser, Serialize)]
#[command(name = "tailscope", version, about = "Gaussian and spherical approximation of high-dimensional marginals")]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct Global {
    /// RNG seed; required by every command that samples
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// output directory
    #[arg(long, global = true, default_value = ".")]
    pub out: PathBuf,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// worker threads (0 = all cores)
    #[arg(long, global = true, env = "TAILSCOPE_THREADS", default_value_t = 0)]
    pub threads: usize,
    /// also write an SVG plot
    #[arg(long, global = true)]
    pub plot: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BodyName {
    Sphere,
    GenGaussian,
    LpCone,
    LpVolume,
    Uniform,
    Rademacher,
    TruncatedNormal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Norm {
    /// natural coordinates
    Raw,
    /// divided by the coordinate standard deviation
    Isotropic,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct BodyArgs {
    #[arg(long, value_enum)]
    pub body: BodyName,
    /// dimension
    #[arg(long)]
    pub n: usize,
    /// ℓₚ exponent (number or "inf")
    #[arg(long, value_parser = parse_exponent)]
    pub p: Option<Exponent>,
    /// half-width of the uniform coordinate law
    #[arg(long, default_value_t = 1.0)]
    pub a: f64,
    /// truncation point of the truncated normal law
    #[arg(long, default_value_t = 2.0)]
    pub cutoff: f64,
    #[arg(long, value_enum, default_value_t = Norm::Isotropic)]
    pub normalize: Norm,
    /// JSON cache of pilot normalization constants
    #[arg(long)]
    pub scale_cache: Option<PathBuf>,
}

fn parse_exponent(s: &str) -> Result<Exponent, String> {
    match s {
        "inf" | "infinity" => Ok(Exponent(f64::INFINITY)),
        _ => {
            let p: f64 = s.parse().map_err(|_| format!("not a number: {s}"))?;
            if p >= 1.0 && p.is_finite() {
                Ok(Exponent(p))
            } else {
                Err(format!("p must be ≥ 1 or \"inf\", got {s}"))
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Emit {
    /// the sample matrix
    Points,
    /// ‖X‖₂/√n per sample
    Radial,
    /// P̂{|‖X‖₂/√n − 1| ≥ u} on a u grid
    Deviation,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Bv,
    Direct,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Source {
    Cone,
    Surface,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    /// Tabulate ψₙ, Ψₙ against φ, Φ
    Refdist {
        #[arg(long, value_parser = clap::value_parser!(u64).range(3..))]
        n: u64,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        t_min: f64,
        #[arg(long, default_value_t = 3.0, allow_negative_numbers = true)]
        t_max: f64,
        #[arg(long, default_value_t = 100)]
        steps: usize,
    },
    /// Draw samples from a body
    Sample {
        #[command(flatten)]
        body: BodyArgs,
        /// number of samples
        #[arg(long = "N")]
        samples: usize,
        #[arg(long, value_enum, default_value_t = Emit::Points)]
        emit: Emit,
        /// write points in the TSB1 binary format instead of CSV
        #[arg(long)]
        binary: bool,
        /// deviation grid: u_steps points in (0, u_max]
        #[arg(long, default_value_t = 1.0)]
        u_max: f64,
        #[arg(long, default_value_t = 200)]
        u_steps: usize,
    },
    /// Average-marginal tail and density from a radial CSV
    Transform {
        /// CSV with an r_over_sqrt_n column
        #[arg(long)]
        radial: PathBuf,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0.0)]
        t_min: f64,
        #[arg(long, default_value_t = 4.0)]
        t_max: f64,
        #[arg(long, default_value_t = 80)]
        steps: usize,
        /// concentration profile JSON for the theorem bound column
        #[arg(long)]
        profile: Option<PathBuf>,
    },
    /// Fit a concentration profile to deviation CSVs
    Fit {
        #[arg(long, required = true, num_args = 1..)]
        deviation: Vec<PathBuf>,
        /// largest deviation probability used in the fit
        #[arg(long, default_value_t = tailscope::concentration::FIT_P_MAX)]
        p_max: f64,
        /// also report the volume profile implied by a cone or surface fit
        #[arg(long, value_enum)]
        transfer: Option<Source>,
    },
    /// Average-marginal tail (or density) of a body against Ψₙ and Φ
    Marginal {
        #[command(flatten)]
        body: BodyArgs,
        /// number of samples
        #[arg(long = "N")]
        samples: usize,
        #[arg(long, default_value_t = 0.0)]
        t_min: f64,
        #[arg(long, default_value_t = 3.0)]
        t_max: f64,
        #[arg(long, default_value_t = 30)]
        steps: usize,
        /// bv: exact transform of the radial sample; direct: x₁ counts
        #[arg(long, value_enum, default_value_t = Method::Bv)]
        method: Method,
        /// estimate the density instead of the tail
        #[arg(long)]
        density: bool,
        /// concentration profile JSON for the theorem bound column
        #[arg(long)]
        profile: Option<PathBuf>,
    },
    /// Per-direction marginal tails (or densities) against Φ
    Sweep {
        #[command(flatten)]
        body: BodyArgs,
        /// largest t of the grid
        #[arg(long = "T")]
        t_max: f64,
        /// number of random directions
        #[arg(long = "M", default_value_t = 200)]
        directions: usize,
        /// number of samples
        #[arg(long = "N")]
        samples: usize,
        /// spacing of the t grid
        #[arg(long, default_value_t = 0.1)]
        t_step: f64,
        /// density sweep with centered histogram bins
        #[arg(long)]
        local: bool,
        /// bin width of the density sweep
        #[arg(long, default_value_t = 0.1)]
        h: f64,
        /// CSV of explicit directions, one per row (overrides --M)
        #[arg(long)]
        direction_file: Option<PathBuf>,
    },
    /// Check an inequality on a grid
    Verify {
        #[arg(long, value_enum, required_unless_present = "all", conflicts_with = "all")]
        lemma: Option<verify::Lemma>,
        /// run every check (needs --seed)
        #[arg(long)]
        all: bool,
        /// restrict the Laplace checks to one exponent
        #[arg(long)]
        beta: Option<f64>,
        /// comma-separated dimensions replacing each check's default list
        #[arg(long, value_delimiter = ',')]
        dims: Option<Vec<usize>>,
        /// compare the fourth-order term after removing its value at t = 0
        #[arg(long)]
        centered: bool,
        /// Monte Carlo sample size where a check samples
        #[arg(long = "N", default_value_t = 100_000)]
        samples: usize,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.global.threads > 0 {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(cli.global.threads).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }
    match commands::run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(3),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn exit_code(e: &anyhow::Error) -> u8 {
    use tailscope::Error as E;
    if e.downcast_ref::<Usage>().is_some() {
        return 2;
    }
    match e.downcast_ref::<E>() {
        Some(E::Dimension { .. } | E::InvalidArgument(_) | E::OutsideRegime { .. }) => 2,
        _ => 1,
    }
}
