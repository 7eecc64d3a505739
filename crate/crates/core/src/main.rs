use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use tracial_fermi::check::{run_checks, CheckLevel, CheckOptions};
use tracial_fermi::config::{parse_config, Scenario};
use tracial_fermi::scenario::run_scenario;

#[derive(Parser)]
#[command(name = "tracial-fermi", version, about = "Finite-lattice laboratory for interacting Fermi systems in the tracial state")]
struct Cli {
    /// Worker threads (default: rayon's choice). Output does not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the scenario described by a config file (key = value or JSON).
    Run {
        config: PathBuf,
        /// Output directory, overriding `out` in the config.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the built-in invariant suite.
    Check {
        /// Lattices up to six sites instead of three.
        #[arg(long)]
        full: bool,
    },
    /// List the available scenarios.
    ListScenarios,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::FAILURE;
        }
    }
    match cli.command {
        Command::Run { config, out } => {
            let text = match std::fs::read_to_string(&config) {
                Ok(t) => t,
                Err(e) => {
                    eprintln!("error: {}: {e}", config.display());
                    return ExitCode::FAILURE;
                }
            };
            let mut cfg = match parse_config(&text) {
                Ok(c) => c,
                Err(e) => {
                    eprintln!("error: {}: {e}", config.display());
                    return ExitCode::FAILURE;
                }
            };
            if let Some(out) = out {
                cfg.out = out;
            }
            match run_scenario(&cfg) {
                Ok(m) => {
                    println!("{} -> {}", m.scenario, cfg.out.display());
                    for (k, v) in &m.summary {
                        println!("  {k} = {v:e}");
                    }
                    if m.window_exceeded {
                        println!("  note: samples beyond the pre-recurrence window t_max = {:?}", m.t_max);
                    }
                    ExitCode::SUCCESS
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::FAILURE
                }
            }
        }
        Command::Check { full } => {
            let level = if full { CheckLevel::Full } else { CheckLevel::Fast };
            let start = std::time::Instant::now();
            let report = run_checks(level, CheckOptions::default());
            println!("{report} ({:.1} s)", start.elapsed().as_secs_f64());
            if report.passed() {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            }
        }
        Command::ListScenarios => {
            for s in Scenario::ALL {
                println!("{:<18} {}", s.name(), s.summary());
            }
            ExitCode::SUCCESS
        }
    }
}
