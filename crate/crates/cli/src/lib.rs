//! Command-line front end: reads a JSON problem description, runs the
//! pipeline with all cross-path checks, and prints a JSON report or a table.

pub mod config;
pub mod report;
pub mod run;
pub mod table;

use std::path::PathBuf;

use clap::{Parser, ValueEnum};

pub use config::{ConfigError, Problem, ProblemConfig, Task};
pub use report::Report;
pub use run::{run, RunError};
pub use table::render_table;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Table,
}

#[derive(Debug, Parser)]
#[command(name = "weylq", version, about = "Exact Q-curvature and obstruction reports for Weyl structures")]
pub struct Cli {
    /// Problem description (JSON).
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
    /// Overrides `truncation_order` from the config.
    #[arg(long)]
    pub truncation: Option<usize>,
    /// Worker threads for the per-mode loops.
    #[arg(long, env = "WEYLQ_JOBS")]
    pub jobs: Option<usize>,
}

/// What the binary prints and returns.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

fn render(report: &Report, format: Format) -> String {
    match format {
        Format::Json => report.to_json(),
        Format::Table => render_table(report),
    }
}

/// Runs one invocation. A report whose checks fail is still printed, with code 3.
pub fn execute(cli: &Cli) -> Outcome {
    let fail = |code: i32, msg: String| Outcome {
        code,
        stdout: String::new(),
        stderr: format!("weylq: {msg}\n"),
    };
    let text = match std::fs::read_to_string(&cli.config) {
        Ok(t) => t,
        Err(e) => return fail(2, format!("cannot read {}: {e}", cli.config.display())),
    };
    let problem = match ProblemConfig::from_json(&text).and_then(|c| c.validate(cli.truncation)) {
        Ok(p) => p,
        Err(e) => return fail(2, e.to_string()),
    };
    let pool = match rayon::ThreadPoolBuilder::new()
        .num_threads(cli.jobs.unwrap_or(0))
        .build()
    {
        Ok(p) => p,
        Err(e) => return fail(2, format!("cannot start {} worker threads: {e}", cli.jobs.unwrap_or(0))),
    };
    match pool.install(|| run(&problem)) {
        Ok(report) => Outcome {
            code: 0,
            stdout: render(&report, cli.format),
            stderr: String::new(),
        },
        Err(RunError::ChecksFailed { failed, report }) => Outcome {
            code: 3,
            stdout: render(&report, cli.format),
            stderr: format!("weylq: consistency checks failed: {}\n", failed.join("; ")),
        },
        Err(e) => fail(e.exit_code(), e.to_string()),
    }
}
