//! `enclosure`: forward runs, indicator sweeps, hull reconstruction, corner
//! spectra and a self-check suite.
//!
//! Exit codes: 0 success, 1 configuration or input, 2 geometry, 3 numerics
//! (including a failed `validate` check), 4 angular coverage.
//! `ENCLOSURE_THREADS` sets the size of the worker pool.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

mod commands;
mod exit;
mod grid;
mod record;
mod validate;

use exit::CliError;

const THREADS_VAR: &str = "ENCLOSURE_THREADS";

#[derive(Parser)]
#[command(name = "enclosure", version, about = "Convex-hull recovery of a conductivity inclusion from one boundary measurement")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the transmission problem and write the boundary data.
    Forward(ForwardArgs),
    /// Indicator values over a τ grid for one direction and shift.
    Indicator(IndicatorArgs),
    /// Support estimates in uniformly spaced directions and their hull.
    Reconstruct(ReconstructArgs),
    /// Corner exponents for a contrast and an outside angle.
    Spectrum(SpectrumArgs),
    /// Run the property checks and print one PASS/FAIL line per check.
    Validate(ValidateArgs),
}

#[derive(clap::Args)]
pub struct ForwardArgs {
    /// Scene JSON; the bundled default scene when omitted.
    #[arg(long)]
    pub scene: Option<PathBuf>,
    #[arg(long, default_value_t = enclosure::forward::DEFAULT_H, allow_hyphen_values = true)]
    pub h: f64,
    #[arg(long, default_value_t = enclosure::forward::DEFAULT_GRADING)]
    pub grading: u32,
    #[arg(long)]
    pub out: PathBuf,
    /// Run even if diam D is not below dist(D, ∂Ω); only a warning is printed.
    #[arg(long)]
    pub allow_restriction_violation: bool,
}

#[derive(clap::Args)]
pub struct IndicatorArgs {
    #[arg(long)]
    pub cauchy: PathBuf,
    #[arg(long, allow_hyphen_values = true)]
    pub phi_deg: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub t: f64,
    /// `LO:HI:N[log|lin]` or a comma-separated list.
    #[arg(long, default_value = "4:13:24log")]
    pub tau: String,
    /// Rows above this τ are marked untrusted.
    #[arg(long, default_value_t = enclosure::probe::FEM_TAU_CAP)]
    pub tau_cap: f64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Clone, Copy, ValueEnum, serde::Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelArg {
    Linear,
    LogCorrected,
}

#[derive(clap::Args)]
pub struct ReconstructArgs {
    #[arg(long)]
    pub cauchy: PathBuf,
    #[arg(long, default_value_t = 16)]
    pub directions: usize,
    /// Scene JSON holding the true inclusion; adds error metrics.
    #[arg(long)]
    pub truth: Option<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value = "3:9:24log")]
    pub tau: String,
    #[arg(long, default_value_t = enclosure::probe::FEM_TAU_CAP)]
    pub tau_cap: f64,
    #[arg(long, value_enum, default_value_t = ModelArg::LogCorrected)]
    pub model: ModelArg,
    /// Power of τ removed by the log-corrected model.
    #[arg(long, default_value_t = 1.0)]
    pub power: f64,
    /// Relative Gaussian noise added to the voltage before fitting.
    #[arg(long, default_value_t = 0.0)]
    pub noise: f64,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
}

#[derive(clap::Args)]
pub struct SpectrumArgs {
    #[arg(long)]
    pub k: f64,
    #[arg(long)]
    pub theta_deg: f64,
    #[arg(long, default_value_t = 5.0)]
    pub mu_max: f64,
    #[arg(long)]
    pub out: PathBuf,
    /// Optional CSV of the compatibility determinant on a fine μ grid.
    #[arg(long)]
    pub det_trace: Option<PathBuf>,
}

#[derive(clap::Args)]
pub struct ValidateArgs {
    #[arg(long)]
    pub scene: Option<PathBuf>,
    #[arg(long, default_value_t = enclosure::forward::DEFAULT_H, allow_hyphen_values = true)]
    pub h: f64,
    #[arg(long, default_value_t = enclosure::forward::DEFAULT_GRADING)]
    pub grading: u32,
    #[arg(long)]
    pub allow_restriction_violation: bool,
}

fn init_threads() -> Result<(), CliError> {
    let Ok(v) = std::env::var(THREADS_VAR) else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .map_err(|_| CliError::config(format!("{THREADS_VAR} must be a positive integer, got '{v}'")))?;
    if n == 0 {
        return Err(CliError::config(format!("{THREADS_VAR} must be at least 1")));
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::config(e.to_string()))
}

fn run(cli: Cli) -> Result<(), CliError> {
    init_threads()?;
    match cli.command {
        Command::Forward(a) => commands::forward(&a),
        Command::Indicator(a) => commands::indicator(&a),
        Command::Reconstruct(a) => commands::reconstruct(&a),
        Command::Spectrum(a) => commands::spectrum(&a),
        Command::Validate(a) => validate::run(&a),
    }
}

fn main() -> ExitCode {
    // clap exits with 2 on usage errors, which is the geometry code here
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code() as u8)
        }
    }
}
