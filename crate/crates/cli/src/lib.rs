//! Command-line front end: single-point reports, P sweeps, figure datasets and
//! the constant table, written as CSV or JSON.

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use spdc_ng::gstate::{delta_b_bits, von_neumann_entropy};
use spdc_ng::moments::mancini_boundary;
use spdc_ng::*;
use thiserror::Error;

pub mod output;
pub mod sweep;

pub use sweep::{FigureId, Quantity};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Compute(#[from] spdc_ng::Error),
    #[error("cannot write output: {0}")]
    Io(#[from] std::io::Error),
    #[error("{failed} of {total} grid points failed")]
    Partial { failed: usize, total: usize },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Compute(_) | CliError::Io(_) => 2,
            CliError::Partial { .. } => 3,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "spdc-ng", version, about = "Spatial correlations and non-Gaussianity of SPDC two-photon states")]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Output file (default: stdout).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, default_value_t = 1e-10)]
    pub abs_tol: f64,
    #[arg(long, global = true, default_value_t = 1e-8)]
    pub rel_tol: f64,
    /// Worker threads (default: all cores).
    #[arg(long, global = true, env = "SPDC_NG_THREADS")]
    pub threads: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Every scalar at a single P.
    Report {
        #[arg(long)]
        p: f64,
        #[arg(long, default_value_t = 1.0)]
        sigma: f64,
    },
    /// Quantities over a grid of P values.
    Sweep {
        #[arg(long, value_enum, required = true)]
        quantity: Vec<Quantity>,
        #[command(flatten)]
        grid: GridArgs,
        #[arg(long, default_value_t = 1.0)]
        sigma: f64,
        /// Gaussian-model α for epr, mancini, var_q_norm and var_x_norm.
        #[arg(long)]
        alpha: Vec<f64>,
    },
    /// Dataset behind one figure.
    Figure {
        #[arg(value_enum)]
        id: FigureId,
        /// P for the cross-section panels 1a-1d (default 0.1 for a-b, 2 for c-d).
        #[arg(long)]
        p: Option<f64>,
        #[command(flatten)]
        grid: GridArgs,
        #[arg(long, default_value_t = 1.0)]
        sigma: f64,
        /// Replaces the preset α set.
        #[arg(long)]
        alpha: Vec<f64>,
    },
    /// Shape constants and derived scalars.
    Constants,
}

#[derive(Debug, Clone, Copy, Args)]
pub struct GridArgs {
    #[arg(long)]
    pub p_min: Option<f64>,
    #[arg(long)]
    pub p_max: Option<f64>,
    #[arg(long)]
    pub steps: Option<usize>,
    /// Log-spaced grid.
    #[arg(long)]
    pub log: bool,
}

/// Units of the reported quantities.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Units {
    pub negentropy: String,
    pub delta_b: String,
    pub delta_b_bits: String,
    pub variances: String,
}

impl Default for Units {
    fn default() -> Self {
        Units {
            negentropy: "bits".into(),
            delta_b: "nats".into(),
            delta_b_bits: "bits".into(),
            variances: "dimensionless".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    #[serde(flatten)]
    pub ng: NgReport,
    pub epr: EprResult,
    pub mancini: f64,
    pub delta_b: f64,
    pub delta_b_bits: f64,
    pub purity: f64,
    pub units: Units,
}

pub fn report(params: &Params, tol: &QuadTolerance) -> Result<Report> {
    let spectrum = symplectic_spectrum(&two_mode_cov(params, tol)?)?;
    Ok(Report {
        ng: ng_report(params, tol)?,
        epr: epr_product(params, tol)?,
        mancini: mancini_product(params, Model::Spdc, tol)?,
        delta_b: von_neumann_entropy(&spectrum),
        delta_b_bits: delta_b_bits(params, tol)?,
        purity: purity(&spectrum),
        units: Units::default(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstantsReport {
    pub shape: ShapeConstants,
    /// α of the Gaussian meeting sinc at 1/e and 1/e² of the peak.
    pub alpha_1_over_e: f64,
    pub alpha_1_over_e2: f64,
    /// α whose Gaussian joint density has the SPDC covariance.
    pub matched_alpha_ff: f64,
    pub matched_alpha_nf: f64,
    /// Marginal negentropies as P → 0 (far field) and P → ∞ (near field).
    pub marginal_limit_ff: f64,
    pub marginal_limit_nf: f64,
    pub nu_plus: f64,
    pub nu_minus: f64,
    pub det_v: f64,
    pub mancini_boundary: f64,
    pub epr_crossing_low: f64,
    pub epr_crossing_high: f64,
    pub units: Units,
}

pub fn constants(tol: &QuadTolerance) -> Result<ConstantsReport> {
    let (marginal_limit_ff, marginal_limit_nf) = marginal_negentropy_limits(tol)?;
    let v = two_mode_cov(&Params::with_p(1.0)?, tol)?;
    let s = symplectic_spectrum(&v)?;
    let (lo, hi) = find_epr_crossings(tol)?;
    Ok(ConstantsReport {
        shape: shape_constants(tol)?,
        alpha_1_over_e: matching_alpha((-1.0f64).exp())?,
        alpha_1_over_e2: matching_alpha((-2.0f64).exp())?,
        matched_alpha_ff: matched_alpha(Plane::FarField, tol)?,
        matched_alpha_nf: matched_alpha(Plane::NearField, tol)?,
        marginal_limit_ff,
        marginal_limit_nf,
        nu_plus: s.nu_plus,
        nu_minus: s.nu_minus,
        det_v: v.det(),
        mancini_boundary: mancini_boundary(tol)?,
        epr_crossing_low: lo,
        epr_crossing_high: hi,
        units: Units::default(),
    })
}

fn params(p: f64, sigma: f64) -> std::result::Result<Params, CliError> {
    Params::new(p, sigma).map_err(|e| CliError::Usage(e.to_string()))
}

/// Run a parsed command, writing its output.
pub fn run(cli: Cli) -> std::result::Result<(), CliError> {
    let Common { format, out, abs_tol, rel_tol, threads } = cli.common;
    let tol = QuadTolerance::new(
        abs_tol,
        rel_tol,
        QuadTolerance::default().max_subdivisions,
        QuadTolerance::default().tail_cutoff,
    )
    .map_err(|e| CliError::Usage(e.to_string()))?;
    if let Some(n) = threads {
        if n == 0 {
            return Err(CliError::Usage("--threads must be at least 1".into()));
        }
        // A second call (tests running in one process) keeps the first pool.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }

    let mut buf = Vec::new();
    let mut outcome = Ok(());
    match cli.command {
        Command::Report { p, sigma } => {
            let r = report(&params(p, sigma)?, &tol)?;
            output::write_record(&mut buf, &r, format)?;
        }
        Command::Constants => {
            let c = constants(&tol)?;
            output::write_record(&mut buf, &c, format)?;
        }
        Command::Sweep { quantity, grid, sigma, alpha } => {
            params(1.0, sigma)?;
            let grid = sweep::grid(&grid)?;
            let table = sweep::sweep(&quantity, &grid, sigma, &alpha, &tol);
            output::write_table(&mut buf, &table, format)?;
            outcome = table.outcome();
        }
        Command::Figure { id, p, grid, sigma, alpha } => {
            params(1.0, sigma)?;
            let table = sweep::figure(id, p, &grid, sigma, &alpha, &tol)?;
            output::write_table(&mut buf, &table, format)?;
            outcome = table.outcome();
        }
    }

    match out {
        Some(path) => std::fs::write(path, &buf)?,
        None => std::io::stdout().lock().write_all(&buf)?,
    }
    outcome
}
