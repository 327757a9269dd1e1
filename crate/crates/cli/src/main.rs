//! `hyrepair` command-line front end.
//!
//! Exit codes: 0 on success, 1 on errors and validation diagnostics, 2 when
//! a model file is malformed, 3 when repair finds no safe parameter values.

mod commands;
mod files;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(name = "hyrepair", version, about = "Repair hybrid automata against STL requirements")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a model file and print its diagnostics.
    Validate { model: PathBuf },
    /// Apply a transformation script to a model.
    Transform {
        model: PathBuf,
        script: PathBuf,
        /// Where to write the transformed model.
        #[arg(short, long)]
        out: PathBuf,
    },
    /// Simulate a model once and write its trace.
    Simulate {
        model: PathBuf,
        /// Input signals (JSON list).
        #[arg(long)]
        signals: Option<PathBuf>,
        /// Bind a parameter, `name=value`. Repeatable.
        #[arg(long = "set", value_name = "NAME=VALUE")]
        set: Vec<String>,
        /// Fix an initial value instead of sampling it, `name=value`. Repeatable.
        #[arg(long = "init", value_name = "NAME=VALUE")]
        init: Vec<String>,
        #[command(flatten)]
        sim: SimArgs,
        /// CSV trace; `<stem>.plot.json` is written next to it.
        #[arg(short, long, default_value = "trace.csv")]
        out: PathBuf,
    },
    /// Search for inputs, initial states and parameters violating a spec.
    Falsify {
        model: PathBuf,
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        signals: Option<PathBuf>,
        /// Search a parameter over a range, `name:lo:hi`. Repeatable.
        #[arg(long = "param", value_name = "NAME:LO:HI")]
        params: Vec<String>,
        #[arg(long = "set", value_name = "NAME=VALUE")]
        set: Vec<String>,
        #[command(flatten)]
        sim: SimArgs,
        #[command(flatten)]
        budget: FalsifyArgs,
        /// Write the best point found as JSON.
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Transform a model with a resiliency pattern and synthesize the
    /// pattern's parameters.
    Repair {
        model: PathBuf,
        /// Transformation script of the resiliency pattern.
        #[arg(long)]
        pattern: PathBuf,
        #[arg(long)]
        spec: PathBuf,
        /// Input signals, including the attack.
        #[arg(long, alias = "attack")]
        signals: Option<PathBuf>,
        /// Mined parameter, `name:lo:hi:inc|dec`. `inc` means larger values
        /// are safer. Repeatable.
        #[arg(long = "param", value_name = "NAME:LO:HI:MONO", required = true)]
        params: Vec<String>,
        /// Fix a parameter, `name=value`. Repeatable.
        #[arg(long = "set", value_name = "NAME=VALUE")]
        set: Vec<String>,
        #[command(flatten)]
        sim: SimArgs,
        #[command(flatten)]
        budget: FalsifyArgs,
        /// Range-shrinking rounds.
        #[arg(long, default_value_t = 5)]
        rounds: usize,
        /// Bisection probes per parameter.
        #[arg(long, default_value_t = 20)]
        probes: usize,
        /// Random runs the result must pass.
        #[arg(long, default_value_t = 500)]
        validation: usize,
        /// Output directory for `repaired.model.json`, `report.json` and
        /// `timing.json`.
        #[arg(short, long, default_value = ".")]
        out: PathBuf,
    },
    /// Print a table of repair results from output directories.
    Summarize {
        #[arg(required = true)]
        dirs: Vec<PathBuf>,
    },
    /// Write the bundled case-study files to a directory.
    ExportCases { dir: PathBuf },
}

#[derive(Args)]
struct SimArgs {
    /// Simulation horizon in seconds.
    #[arg(long = "T", default_value_t = 10.0)]
    horizon: f64,
    /// Integration step in seconds.
    #[arg(long = "h", default_value_t = 1e-3)]
    step: f64,
    /// Random seed. The HYREPAIR_SEED environment variable takes precedence.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct FalsifyArgs {
    /// Objective evaluations per falsification run.
    #[arg(long, default_value_t = 200)]
    evals: usize,
    /// Wall-clock cap per falsification run, in seconds.
    #[arg(long, default_value_t = 30.0)]
    wall_time: f64,
    /// Simulation workers; 0 uses every core.
    #[arg(long, default_value_t = 0)]
    workers: usize,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            let malformed = e.chain().any(|c| c.downcast_ref::<hyrepair::model::FormatError>().is_some());
            ExitCode::from(if malformed { 2 } else { 1 })
        }
    }
}
