use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use fracgreen::{load_config, Command, Runner, Status};

/// Green's functions of the fractional Laplacian: kernel evaluation, solvers
/// and numerical certificates.
#[derive(Debug, Parser)]
#[command(name = "fracgreen", version, subcommand_required = true)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Debug, Subcommand)]
enum Cmd {
    /// Evaluate G(x, pole) on the configured grid.
    KernelEval(RunArgs),
    /// Solve u = T(u^p) on the ball grid.
    SolveBall(RunArgs),
    /// Solve, then sweep moving planes along the configured axes.
    MovingPlane(RunArgs),
    /// Scan the exponent cascade over (n, alpha, p).
    LiouvilleScan(RunArgs),
    /// Run the configured property suites.
    Verify(RunArgs),
    /// verify, solve-ball, moving-plane and liouville-scan in turn.
    All(RunArgs),
}

#[derive(Debug, Args)]
struct RunArgs {
    /// JSON configuration file.
    #[arg(long)]
    config: PathBuf,
    /// Overrides the configured seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Overrides the configured output directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl Cmd {
    fn split(self) -> (Command, RunArgs) {
        match self {
            Cmd::KernelEval(a) => (Command::KernelEval, a),
            Cmd::SolveBall(a) => (Command::SolveBall, a),
            Cmd::MovingPlane(a) => (Command::MovingPlane, a),
            Cmd::LiouvilleScan(a) => (Command::LiouvilleScan, a),
            Cmd::Verify(a) => (Command::Verify, a),
            Cmd::All(a) => (Command::All, a),
        }
    }
}

const USAGE_ERROR: u8 = 2;

fn main() -> ExitCode {
    let (command, cli) = Cli::parse().command.split();

    if let Ok(v) = std::env::var("FRACGREEN_THREADS") {
        match v.trim().parse::<usize>() {
            Ok(k) if k >= 1 => {
                if let Err(e) = rayon::ThreadPoolBuilder::new()
                    .num_threads(k)
                    .build_global()
                {
                    eprintln!("error: cannot configure worker threads: {e}");
                    return ExitCode::from(USAGE_ERROR);
                }
            }
            _ => {
                eprintln!("error: FRACGREEN_THREADS must be a positive integer, got `{v}`");
                return ExitCode::from(USAGE_ERROR);
            }
        }
    }

    let mut cfg = match load_config(&cli.config) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(USAGE_ERROR);
        }
    };
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(out) = cli.out {
        cfg.output_dir = out;
    }

    match Runner::new(cfg).run(command) {
        Ok(status) => {
            if let Status::Failed(msg) = &status {
                eprintln!("failed: {msg}");
            }
            ExitCode::from(status.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(USAGE_ERROR)
        }
    }
}
