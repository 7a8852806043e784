use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use qlim::{run, CliError, Command};

#[derive(Parser)]
#[command(name = "qlim", version, about = "Quantum and Planck-scale noise budgets")]
struct Args {
    #[arg(value_enum)]
    command: Command,
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Overrides the seed in the config.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads; 0 lets the runtime decide.
    #[arg(long, env = "QLIM_THREADS", default_value_t = 0)]
    threads: usize,
}

fn main() -> ExitCode {
    let args = Args::parse();
    if args.threads > 0 {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(args.threads).build_global() {
            let err = CliError::Io(format!("thread pool: {e}"));
            eprintln!("{}", err.to_json());
            return ExitCode::from(err.exit_code() as u8);
        }
    }
    match run(args.command, &args.config, &args.out, args.seed) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.to_json());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
