mod commands;
mod error;
mod output;
mod spec;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

/// Subordinated Lévy processes: characteristic functions, jump measures,
/// simulation and recovery of the time change.
#[derive(Debug, Parser)]
#[command(name = "subord", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Log characteristic function of X₁ = L_{T₁} on a θ grid.
    Cf(Opts),
    /// Triplet of the subordinated law, with jump masses on a partition.
    Subordinate(Opts),
    /// Masses of the mixed measure ∫ μ_L^s(·) ρ(ds) on a partition.
    Mix(Opts),
    /// Simulated paths of X, T or L.
    Simulate(Opts),
    /// Fit a subordinator family to observed or simulated increments.
    Recover(Opts),
    /// One realisation per replicate of the subordinated Lévy basis on the seed cells.
    BasisSim(Opts),
    /// Lévy semistationary process driven by X.
    LssSim(Opts),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Process {
    /// The subordinated process X = L_T.
    X,
    /// The subordinator T.
    T,
    /// The base process L.
    L,
}

#[derive(Debug, Clone, Args)]
pub struct Opts {
    /// Model file (JSON).
    #[arg(long)]
    pub model: Option<PathBuf>,
    /// Output file; several results go to numbered siblings.
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, allow_negative_numbers = true)]
    pub theta_min: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub theta_max: Option<f64>,
    /// Number of θ intervals between min and max.
    #[arg(long)]
    pub theta_steps: Option<usize>,
    /// Explicit θ values, comma separated; overrides the range flags.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub theta: Option<Vec<f64>>,
    #[arg(long)]
    pub dt: Option<f64>,
    #[arg(long, default_value_t = 1.0)]
    pub horizon: f64,
    #[arg(long, default_value_t = 1)]
    pub n_paths: usize,
    /// Jump truncation level for simulation (chosen automatically if absent).
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// drift, gamma, stable, stable:<alpha>, compound-exp
    #[arg(long, default_value = "gamma")]
    pub family: String,
    #[arg(long, default_value_t = 30.0)]
    pub burn_in: f64,
    /// Interval edges, comma separated; intervals straddling 0 are skipped.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub partition: Option<Vec<f64>>,
    #[arg(long, value_enum, default_value_t = Process::X)]
    pub process: Process,
    /// Path files (t,value) to recover from instead of simulating the model.
    #[arg(long, num_args = 1..)]
    pub paths: Vec<PathBuf>,
    /// Number of simulated increments when recovering from the model.
    #[arg(long, default_value_t = 100_000)]
    pub n_obs: usize,
    #[arg(long, default_value_t = 8)]
    pub starts: usize,
    /// Inverse-variance weights in the recovery fit.
    #[arg(long)]
    pub weighted: bool,
    /// Fit a drift β₀ alongside the jump part.
    #[arg(long)]
    pub with_drift: bool,
    /// Also write the driving increments of an LSS run here.
    #[arg(long)]
    pub driver_out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Cf(o) => commands::cf(o),
        Command::Subordinate(o) => commands::subordinate(o),
        Command::Mix(o) => commands::mix(o),
        Command::Simulate(o) => commands::simulate(o),
        Command::Recover(o) => commands::recover(o),
        Command::BasisSim(o) => commands::basis_sim(o),
        Command::LssSim(o) => commands::lss_sim(o),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
