use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use poiseuille_lab::{execute, Command, Settings};

#[derive(Parser)]
#[command(name = "poiseuille-lab", version, about = "Spectral experiments on Poiseuille flow in a periodic strip")]
struct Cli {
    /// JSON file of settings; flags override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Worker threads; defaults to the number of logical cores.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Solve one Fourier mode and report its estimates.
    Solve(Settings),
    /// Solve a grid of (phi, n) cells and fit flux exponents.
    Sweep(Settings),
    /// Split one mode into its boundary-layer pieces.
    Decompose(Settings),
    /// Picard iteration for the truncated nonlinear problem.
    Nonlinear(Settings),
    /// Restart Picard from a perturbed solution and measure contraction.
    Uniqueness(Settings),
    /// Randomized audit of the one-dimensional inequalities.
    Inequalities(Settings),
    /// Smallest singular value of the discrete mode operator.
    Spectrum(Settings),
}

impl Cmd {
    fn split(self) -> (Command, Settings) {
        match self {
            Cmd::Solve(s) => (Command::Solve, s),
            Cmd::Sweep(s) => (Command::Sweep, s),
            Cmd::Decompose(s) => (Command::Decompose, s),
            Cmd::Nonlinear(s) => (Command::Nonlinear, s),
            Cmd::Uniqueness(s) => (Command::Uniqueness, s),
            Cmd::Inequalities(s) => (Command::Inequalities, s),
            Cmd::Spectrum(s) => (Command::Spectrum, s),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (command, flags) = cli.command.split();
    match execute(command, cli.config.as_deref(), flags, cli.jobs) {
        Ok(outcome) => {
            println!("{}", outcome.summary);
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
