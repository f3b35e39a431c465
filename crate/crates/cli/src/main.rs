use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use exsteer_cli::{load_config, run_and_export, thread_cap, Command, Overrides};

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Cmd {
    GramianReport,
    CheckConditions,
    SteerLinear,
    SteerSemilinear,
    DemoNoncoercivity,
    Selftest,
}

impl From<Cmd> for Command {
    fn from(c: Cmd) -> Self {
        match c {
            Cmd::GramianReport => Command::GramianReport,
            Cmd::CheckConditions => Command::CheckConditions,
            Cmd::SteerLinear => Command::SteerLinear,
            Cmd::SteerSemilinear => Command::SteerSemilinear,
            Cmd::DemoNoncoercivity => Command::DemoNoncoercivity,
            Cmd::Selftest => Command::Selftest,
        }
    }
}

/// Partial steering of heat-exchanger transport models.
#[derive(Debug, Parser)]
#[command(name = "exsteer", version)]
struct Args {
    #[arg(value_enum)]
    command: Cmd,
    /// Scenario document (`key = value` lines).
    #[arg(long)]
    config: PathBuf,
    /// Output directory; overrides `output.dir`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Grid cells; overrides `grid.n_cells` (and `selftest.n_cells` for selftest).
    #[arg(long)]
    n_cells: Option<usize>,
    /// Seed for the randomized selftest subsets.
    #[arg(long)]
    seed: Option<u64>,
}

fn main() -> ExitCode {
    let args = Args::parse();
    let threads = match thread_cap(std::env::var("EXSTEER_THREADS").ok().as_deref()) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let overrides = Overrides {
        command: Some(args.command.into()),
        n_cells: args.n_cells,
        seed: args.seed,
        output_dir: args.out,
        base_dir: None,
    };
    let cfg = match load_config(&args.config, &overrides) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    match run_and_export(&cfg) {
        Ok((report, paths)) => {
            print!("{}", report.summary());
            if let Some(n) = threads {
                println!("threads cap: {n} (commands run serially)");
            }
            for p in paths {
                println!("wrote {}", p.display());
            }
            if report.passed() {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
