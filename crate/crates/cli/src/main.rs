//! `nlskdv`: batch driver for ground states, bound states and thresholds.

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::{CliError, InitKind, Overrides, RunConfig, SweepAxis};

const EXIT_VERIFY: u8 = 1;
const EXIT_SOLVER: u8 = 2;
const EXIT_USAGE: u8 = 64;

#[derive(Parser)]
#[command(name = "nlskdv", version, about = "Coupled NLS-KdV ground states on the Nehari manifold")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    flags: Flags,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Closed-form identity suite on a line grid.
    Verify,
    /// Ground state by constrained descent.
    Ground,
    /// Mountain-pass critical point between the semi-trivial state and the ground state.
    MountainPass,
    /// Threshold eigenvalue of the semi-trivial profile.
    Lambda,
    /// Largeness threshold for λ₂ by bisection.
    Threshold,
    /// Schwarz symmetrization of a stored profile with inequality report.
    Symmetrize,
    /// Parameter sweep over beta or lambda2, one CSV row per point.
    Sweep,
}

#[derive(Args)]
struct Flags {
    /// Flat key = value config file; flags override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// PDE order: 2 (Laplacian) or 4 (bilaplacian).
    #[arg(long, global = true, value_parser = ["2", "4"])]
    order: Option<String>,
    #[arg(long, global = true)]
    dim: Option<usize>,
    #[arg(long, global = true)]
    lambda1: Option<f64>,
    #[arg(long, global = true)]
    lambda2: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    beta: Option<f64>,
    /// Domain radius; defaults to 40/sqrt(min(lambda1, lambda2)).
    #[arg(long, global = true)]
    radius: Option<f64>,
    #[arg(long, global = true)]
    points: Option<usize>,
    #[arg(long, global = true)]
    tol: Option<f64>,
    #[arg(long, global = true)]
    max_iters: Option<usize>,
    /// Mountain-pass path nodes.
    #[arg(long, global = true)]
    nodes: Option<usize>,
    /// Seed for randomized initializations (default 42).
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Emit JSON instead of CSV.
    #[arg(long, global = true)]
    json: bool,
    /// Initial state: diagonal, near-v2 or random.
    #[arg(long, global = true)]
    init: Option<InitKind>,
    /// Stored profile to symmetrize.
    #[arg(long, global = true)]
    input: Option<PathBuf>,
    /// Component of the stored profile to symmetrize.
    #[arg(long, global = true)]
    component: Option<String>,
    #[arg(long, global = true)]
    sweep_axis: Option<SweepAxis>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    sweep_from: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    sweep_to: Option<f64>,
    #[arg(long, global = true)]
    sweep_steps: Option<usize>,
}

impl Flags {
    fn overrides(&self) -> Overrides {
        Overrides {
            order: self.order.as_deref().map(|s| s.parse().expect("validated by clap")),
            dimension: self.dim,
            lambda1: self.lambda1,
            lambda2: self.lambda2,
            beta: self.beta,
            radius: self.radius,
            points: self.points,
            tol: self.tol,
            max_iters: self.max_iters,
            path_nodes: self.nodes,
            seed: self.seed,
            out: self.out.clone(),
            json: self.json,
            init: self.init,
            input: self.input.clone(),
            component: self.component.clone(),
            sweep_axis: self.sweep_axis,
            sweep_from: self.sweep_from,
            sweep_to: self.sweep_to,
            sweep_steps: self.sweep_steps,
        }
    }
}

fn run(cli: &Cli) -> Result<bool, CliError> {
    let cfg = RunConfig::resolve(cli.flags.config.as_deref(), &cli.flags.overrides())?;
    match cli.command {
        Command::Verify => commands::verify(&cfg),
        Command::Ground => commands::ground_cmd(&cfg),
        Command::MountainPass => commands::mountain_pass_cmd(&cfg),
        Command::Lambda => commands::lambda_cmd(&cfg),
        Command::Threshold => commands::threshold_cmd(&cfg),
        Command::Symmetrize => commands::symmetrize_cmd(&cfg),
        Command::Sweep => commands::sweep_cmd(&cfg),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("verification failed");
            ExitCode::from(EXIT_VERIFY)
        }
        Err(e) => {
            eprintln!("nlskdv: {e}");
            ExitCode::from(match e {
                CliError::Usage(_) => EXIT_USAGE,
                CliError::Solver(_) | CliError::Io(_) => EXIT_SOLVER,
            })
        }
    }
}
