use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use hardy_blowup::harness::{self, CommandArgs, CommandResult};

#[derive(Parser)]
#[command(
    name = "hardy-blowup",
    version,
    about = "Blow-up experiments for a pseudo-parabolic equation with Hardy potential"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct Common {
    /// Experiment configuration (TOML)
    #[arg(long)]
    config: PathBuf,
    /// Output file
    #[arg(long)]
    out: Option<PathBuf>,
    /// Overrides the config seed
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Check the model hypotheses
    Validate(Common),
    /// Run the solver and write the trajectory CSV
    Simulate(Common),
    /// Evaluate the blow-up time bounds
    Bounds {
        #[command(flatten)]
        common: Common,
        /// Trajectory CSV written by `simulate`
        #[arg(long)]
        trajectory: Option<PathBuf>,
    },
    /// Run the identity, monotonicity and Hardy suites
    Verify(Common),
    /// Run a parameter sweep
    Sweep(Common),
    /// Estimate the embedding and bound constants
    Constants(Common),
}

fn args(c: Common) -> CommandArgs {
    CommandArgs {
        config: c.config,
        out: c.out,
        seed: c.seed,
        trajectory: None,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let stdout = std::io::stdout();
    let mut lock = stdout.lock();
    let result: CommandResult = match cli.command {
        Command::Validate(c) => harness::cmd_validate(&args(c), &mut lock),
        Command::Simulate(c) => harness::cmd_simulate(&args(c), &mut lock),
        Command::Bounds { common, trajectory } => {
            let mut a = args(common);
            a.trajectory = trajectory;
            harness::cmd_bounds(&a, &mut lock)
        }
        Command::Verify(c) => harness::cmd_verify(&args(c), &mut lock),
        Command::Sweep(c) => harness::cmd_sweep(&args(c), &mut lock),
        Command::Constants(c) => harness::cmd_constants(&args(c), &mut lock),
    };
    let _ = lock.flush();
    match result {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code as u8)
        }
    }
}
