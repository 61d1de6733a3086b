use std::path::PathBuf;
use std::process::ExitCode;

use anchorlab::iteration::CHECK_TOL;
use anchorlab::operators::DEFAULT_SEED;
use anchorlab_cli::{check, CliError, Format, RunArgs, RunOptions, EXIT_FAILED, EXIT_OK};
use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "anchorlab", version, about = "Anchored implication and event-indexed contraction scenarios")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run built-in scenarios or JSON configs and write their tables.
    Run {
        /// Scenario names (see `list`) or config file paths.
        #[arg(required = true)]
        targets: Vec<String>,
        /// Output file for one target, or a directory for several.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum)]
        format: Option<Format>,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        /// Orbit length for scenarios with a free horizon.
        #[arg(long = "nmax")]
        n_max: Option<usize>,
    },
    /// List the built-in scenarios.
    List,
    /// Check a recorded trace against a decay envelope.
    Check {
        trace: PathBuf,
        #[arg(long)]
        envelope: PathBuf,
        #[arg(long, default_value_t = CHECK_TOL)]
        tol: f64,
    },
}

fn execute(cli: Cli) -> Result<u8, CliError> {
    match cli.command {
        Command::Run { targets, out, format, seed, n_max } => {
            let args = RunArgs { targets, out, format, opts: RunOptions { seed, n_max } };
            let passed = anchorlab_cli::run(&args, &mut std::io::stdout().lock(), &mut std::io::stderr().lock())?;
            Ok(if passed { EXIT_OK } else { EXIT_FAILED })
        }
        Command::List => {
            anchorlab_cli::list(&mut std::io::stdout().lock())?;
            Ok(EXIT_OK)
        }
        Command::Check { trace, envelope, tol } => {
            let r = check::check_files(&trace, &envelope, tol)?;
            if r.certified {
                println!("certified: {} indices checked, {} tight", r.checked, r.tight_indices.len());
                Ok(EXIT_OK)
            } else {
                println!("violated at n = {}", r.first_violation.unwrap_or_default());
                Ok(EXIT_FAILED)
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
