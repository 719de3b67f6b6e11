//! Scenario runner behind the `dpdc` binary.
//!
//! Exit codes: 0 when every checked comparison passes, 1 on a tolerance
//! failure, 2 on a configuration error, 3 on a solver failure.

pub mod config;
pub mod report;
mod tasks;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

pub use config::{Scenario, Sweep, Task, ToleranceConfig, Truncation};
pub use report::{ComparisonRow, Table};

use crate::error::{Error, Result};

#[derive(Debug, Parser)]
#[command(name = "dpdc", version, about = "Metrology scenarios for driven-dissipative degenerate down-conversion")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run every task of a scenario file.
    Run {
        config: PathBuf,
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
        /// Worker threads for sweeps; all cores when omitted.
        #[arg(long)]
        threads: Option<usize>,
        /// Reject unknown configuration keys.
        #[arg(long, default_value_t = true, action = clap::ArgAction::Set)]
        strict: bool,
    },
    /// List the available task tags.
    ListTasks,
    /// Print a complete scenario with default values.
    PrintDefaults,
}

/// Outcome of a scenario run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunOutcome {
    pub rows: Vec<ComparisonRow>,
    pub table: String,
    pub ignored_keys: Vec<String>,
}

impl RunOutcome {
    pub fn pass(&self) -> bool {
        report::all_pass(&self.rows)
    }
}

/// Exit code for an error: configuration problems give 2, everything else
/// is a solver failure and gives 3.
pub fn exit_code(err: &Error) -> u8 {
    match err {
        Error::Config(_) | Error::OutOfRegime { .. } | Error::InvalidParameter { .. } => 2,
        _ => 3,
    }
}

/// Runs every task of the scenario and writes one CSV/JSON pair per task plus
/// a summary into `out_dir`.
pub fn run(config: &Path, out_dir: &Path, threads: Option<usize>, strict: bool) -> Result<RunOutcome> {
    let (scenario, ignored_keys) = Scenario::load(config, strict)?;
    std::fs::create_dir_all(out_dir).map_err(|e| Error::Config(format!("cannot create {}: {e}", out_dir.display())))?;
    // Sweep points run in parallel; keep the linear algebra itself sequential
    // so results do not depend on the thread count.
    faer::set_global_parallelism(faer::Par::Seq);
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        if n == 0 {
            return Err(Error::Config("--threads must be positive".into()));
        }
        builder = builder.num_threads(n);
    }
    let pool = builder.build().map_err(|e| Error::Config(format!("thread pool: {e}")))?;

    let mut rows = Vec::new();
    for &task in &scenario.tasks {
        let (table, task_rows) = pool.install(|| tasks::run_task(task, &scenario))?;
        report::write_task(out_dir, &scenario, task.tag(), &table, &task_rows)?;
        rows.extend(task_rows);
    }
    let table = report::write_summary(out_dir, &scenario, &rows)?;
    Ok(RunOutcome { rows, table, ignored_keys })
}

/// Entry point of the binary.
pub fn main_with(cli: Cli) -> ExitCode {
    match cli.command {
        Command::ListTasks => {
            for t in Task::ALL {
                println!("{:<15} {}", t.tag(), t.describe());
            }
            ExitCode::SUCCESS
        }
        Command::PrintDefaults => {
            print!("{}", toml::to_string(&Scenario::default()).expect("default scenario serializes"));
            ExitCode::SUCCESS
        }
        Command::Run { config, out_dir, threads, strict } => match run(&config, &out_dir, threads, strict) {
            Ok(outcome) => {
                for k in &outcome.ignored_keys {
                    eprintln!("warning: ignoring unknown key {k}");
                }
                print!("{}", outcome.table);
                if outcome.pass() {
                    ExitCode::SUCCESS
                } else {
                    ExitCode::from(1)
                }
            }
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::from(exit_code(&e))
            }
        },
    }
}
