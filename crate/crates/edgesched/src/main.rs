use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};

use edgesched::harness::{self, HarnessError, PolicyKind};
use edgesched::scenario::ScenarioError;

/// Exit codes: 0 success, 1 config error, 2 infeasible everywhere, 3 I/O error.
#[derive(Parser)]
#[command(name = "edgesched", version, about = "Offloading policy experiments on a device/edge/cloud cost model")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compare the offloading policies on a single task batch
    Compare {
        /// Scenario JSON; defaults to the built-in three-node setup
        #[arg(long)]
        scenario: Option<PathBuf>,
        /// Number of generated tasks (ignored when the scenario embeds tasks)
        #[arg(short = 'q', long = "tasks")]
        tasks: Option<usize>,
        /// Workload seed
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Comma-separated policy list (local_only, cloud_only, random,
        /// edge_multi_layer); defaults to all four
        #[arg(long)]
        policies: Option<String>,
        /// Append a brute-force oracle row (small batches only)
        #[arg(long)]
        verify: bool,
    },
    /// Run a parameter sweep and write row and summary CSVs
    Sweep {
        /// Sweep config JSON
        #[arg(long)]
        config: PathBuf,
        /// Override the config's scenario path
        #[arg(long)]
        scenario: Option<PathBuf>,
        /// Override the config's base seed
        #[arg(long)]
        seed: Option<u64>,
        /// Override the config's output CSV path
        #[arg(long)]
        out: Option<PathBuf>,
        /// Override the config's policy list
        #[arg(long)]
        policies: Option<String>,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code(&err))
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode, HarnessError> {
    match cli.command {
        Command::Compare {
            scenario,
            tasks,
            seed,
            policies,
            verify,
        } => {
            let policies = resolve_policies(policies)?;
            let report = harness::run_compare(scenario.as_deref(), tasks, seed, &policies, verify)?;
            print!("{report}");
            Ok(if report.all_infeasible() {
                ExitCode::from(2)
            } else {
                ExitCode::SUCCESS
            })
        }
        Command::Sweep {
            config,
            scenario,
            seed,
            out,
            policies,
        } => {
            let mut cfg = harness::load_sweep_config(&config)?;
            if let Some(path) = scenario {
                cfg.scenario_path = Some(path);
            }
            if let Some(seed) = seed {
                cfg.base_seed = seed;
            }
            if let Some(path) = out {
                cfg.output_path = Some(path);
            }
            if let Some(list) = policies {
                cfg.policies = PolicyKind::parse_list(&list)?;
            }
            let (outcome, rows_path, summary_path) = harness::run_sweep(&cfg)?;
            println!("wrote {} rows to {}", outcome.rows.len(), rows_path.display());
            println!("wrote summary to {}", summary_path.display());
            Ok(if outcome.all_infeasible() {
                ExitCode::from(2)
            } else {
                ExitCode::SUCCESS
            })
        }
    }
}

fn resolve_policies(list: Option<String>) -> Result<Vec<PolicyKind>, HarnessError> {
    match list {
        Some(list) => PolicyKind::parse_list(&list),
        None => Ok(PolicyKind::ALL.to_vec()),
    }
}

fn exit_code(err: &HarnessError) -> u8 {
    match err {
        HarnessError::ConfigParse(_) | HarnessError::Solve(_) | HarnessError::Model(_) => 1,
        HarnessError::ScenarioLoad(ScenarioError::Read { .. }) => 3,
        HarnessError::ScenarioLoad(_) => 1,
        HarnessError::ConfigRead { .. } | HarnessError::OutputWrite { .. } => 3,
    }
}
