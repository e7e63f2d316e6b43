//! `scatter2d`: synthesize far-field data, reconstruct potentials and run the
//! verification suites.
//!
//! Exit codes: 0 success, 1 other failure, 2 usage error, 3 solver failure,
//! 4 verification failure.

mod commands;
mod config;
mod verify;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::ExperimentConfig;

/// Bad flags, config entries or inputs.
#[derive(Debug)]
pub struct Usage(pub String);

impl std::fmt::Display for Usage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

/// A verification suite reported failures.
#[derive(Debug)]
pub struct VerifyFailed(pub usize);

impl std::fmt::Display for VerifyFailed {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} verification checks failed", self.0)
    }
}

impl std::error::Error for VerifyFailed {}

#[derive(Parser)]
#[command(name = "scatter2d", version, about = "Far-field synthesis and Born / iterative reconstruction of 2-D potentials")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate far-field data for a phantom.
    Synthesize(Flags),
    /// Born approximation from data files or freshly simulated data.
    Born(DataFlags),
    /// Iterative reconstruction; writes every iterate.
    Iterate(DataFlags),
    /// Error tables over wavenumbers and grid sizes, or the discretization studies.
    Sweep(SweepFlags),
    /// Run an invariant suite and exit nonzero on failure.
    Verify {
        #[arg(long, default_value = "all", value_parser = ["geometry", "special", "solver", "sampling", "all"])]
        suite: String,
    },
}

/// Experiment settings; each overrides the same key of `--config`.
#[derive(Args, Default)]
struct Flags {
    /// `key = value` file applied before the flags.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Half-width of the periodic cell.
    #[arg(long = "R")]
    r: Option<String>,
    /// Nodes per direction (even).
    #[arg(long = "N")]
    n: Option<String>,
    /// fixed-energy | fixed-angle | backscattering | full-data
    #[arg(long)]
    scenario: Option<String>,
    #[arg(long)]
    k0: Option<String>,
    /// Incident angle in radians, or a unit vector `x,y`.
    #[arg(long)]
    theta0: Option<String>,
    /// Full-data directions: a count, or `;`-separated angles or vectors.
    #[arg(long)]
    angles: Option<String>,
    /// annulus-square | zero | gaussian | scaled:<f>:<name>
    #[arg(long)]
    phantom: Option<String>,
    /// Relative Gaussian noise level, e.g. 0.05.
    #[arg(long)]
    noise: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    /// dataset | field
    #[arg(long = "noise-at")]
    noise_at: Option<String>,
    /// GMRES relative tolerance.
    #[arg(long)]
    tol: Option<String>,
    #[arg(long)]
    iters: Option<String>,
    /// Output directory.
    #[arg(long)]
    out: Option<String>,
    /// Fine/coarse grid ratio of the aliasing study.
    #[arg(long = "fine-factor")]
    fine_factor: Option<String>,
}

#[derive(Args)]
struct DataFlags {
    #[command(flatten)]
    flags: Flags,
    /// Dataset CSV; repeat for a full-data average. Without it, data is simulated.
    #[arg(long)]
    data: Vec<PathBuf>,
    /// Nodal CSV of the true potential for error reporting.
    #[arg(long)]
    reference: Option<PathBuf>,
}

#[derive(Args)]
struct SweepFlags {
    #[command(flatten)]
    flags: Flags,
    /// Scenario of the sweep (alias of --scenario).
    #[arg(long)]
    mode: Option<String>,
    /// Comma-separated wavenumbers (fixed energy).
    #[arg(long)]
    k: Option<String>,
    /// Comma-separated grid sizes.
    #[arg(long)]
    sizes: Option<String>,
    /// iterate | aliasing | sampling
    #[arg(long)]
    study: Option<String>,
}

impl Flags {
    fn resolve(&self, extra: &[(&str, &Option<String>)]) -> anyhow::Result<ExperimentConfig> {
        let mut cfg = ExperimentConfig::default();
        if let Some(path) = &self.config {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Usage(format!("cannot read config {}: {e}", path.display())))?;
            cfg.apply_file(&text)?;
        }
        let pairs: [(&str, &Option<String>); 14] = [
            ("R", &self.r),
            ("N", &self.n),
            ("scenario", &self.scenario),
            ("k0", &self.k0),
            ("theta0", &self.theta0),
            ("angles", &self.angles),
            ("phantom", &self.phantom),
            ("noise", &self.noise),
            ("seed", &self.seed),
            ("noise_at", &self.noise_at),
            ("tol", &self.tol),
            ("iters", &self.iters),
            ("out", &self.out),
            ("fine_factor", &self.fine_factor),
        ];
        for (key, value) in pairs.iter().chain(extra) {
            if let Some(v) = value {
                cfg.set(key, v)?;
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn dispatch(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Synthesize(flags) => commands::synthesize(&flags.resolve(&[])?),
        Command::Born(d) => commands::born(&d.flags.resolve(&[])?, &d.data, d.reference.as_deref()),
        Command::Iterate(d) => commands::iterate(&d.flags.resolve(&[])?, &d.data, d.reference.as_deref()),
        Command::Sweep(s) => {
            let cfg = s.flags.resolve(&[("scenario", &s.mode), ("k", &s.k), ("sizes", &s.sizes), ("study", &s.study)])?;
            commands::sweep(&cfg)
        }
        Command::Verify { suite } => verify::run(&suite),
    }
}

fn exit_code(err: &anyhow::Error) -> u8 {
    if err.downcast_ref::<Usage>().is_some() {
        return 2;
    }
    if err.downcast_ref::<VerifyFailed>().is_some() {
        return 4;
    }
    for cause in err.chain() {
        if let Some(e) = cause.downcast_ref::<scatter2d_core::Error>() {
            if e.is_solver_failure() {
                return 3;
            }
        }
    }
    1
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}
