//! Command-line front end: `run`, `compare`, `oracle`, `validate`.
//!
//! Results go to stdout as JSON. Failures print
//! `{"error": {"kind": ..., "message": ...}}` to stderr and exit with 1
//! (2 for a config that parses but fails validation).

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::json;

use randproj::harness::{
    self, centralized_oracle, generate_instance, experiment::instance_seed, OracleBudget,
};
use randproj::{AlgorithmKind, Error, ExperimentConfig, Result, StepSizeSchedule};

#[derive(Parser)]
#[command(name = "randproj", version, about = "Distributed random projected optimization experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    config: PathBuf,
    /// Override the master seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Override the output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_parser = parse_kind)]
    algorithm: Option<AlgorithmKind>,
}

#[derive(Subcommand)]
enum Command {
    /// Run the configured experiment and write CSV/JSON output.
    Run(Common),
    /// Run the experiment once per step-size schedule, paired by seed.
    Compare {
        #[command(flatten)]
        common: Common,
        /// `BASE` or `BASE:EXPONENT`; repeat. Defaults to 1 and 0.001.
        #[arg(long = "schedule", value_parser = parse_schedule)]
        schedules: Vec<StepSizeSchedule>,
    },
    /// Solve the configured instance with the centralized reference solver.
    Oracle {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 1_000_000)]
        budget: u64,
    },
    /// Check the network weights and connectivity without running.
    Validate(Common),
}

fn parse_kind(s: &str) -> std::result::Result<AlgorithmKind, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_schedule(s: &str) -> std::result::Result<StepSizeSchedule, String> {
    let (base, exp) = match s.split_once(':') {
        Some((b, e)) => (b, e),
        None => (s, "1"),
    };
    let base: f64 = base.parse().map_err(|_| format!("bad step base {base:?}"))?;
    let exp: f64 = exp.parse().map_err(|_| format!("bad step exponent {exp:?}"))?;
    StepSizeSchedule::new(base, exp).map_err(|e| e.to_string())
}

fn load(common: &Common) -> Result<ExperimentConfig> {
    let mut cfg = ExperimentConfig::load(&common.config)?;
    if let Some(seed) = common.seed {
        cfg.experiment.seed = seed;
    }
    if let Some(out) = &common.out {
        cfg.output.dir = out.clone();
    }
    if let Some(kind) = common.algorithm {
        cfg.algorithm.kind = kind;
    }
    Ok(cfg)
}

fn print<T: Serialize>(value: &T) {
    println!("{}", serde_json::to_string_pretty(value).expect("serializable output"));
}

fn execute(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Run(common) => {
            let cfg = load(&common)?;
            print(&harness::run_experiment(&cfg)?);
        }
        Command::Compare { common, schedules } => {
            let cfg = load(&common)?;
            let schedules = if schedules.is_empty() {
                vec![StepSizeSchedule::harmonic(1.0)?, StepSizeSchedule::harmonic(1e-3)?]
            } else {
                schedules
            };
            let dir = cfg.output.dir.clone();
            print(&harness::run_comparison(&cfg, &schedules, &dir)?);
        }
        Command::Oracle { common, budget } => {
            let cfg = load(&common)?;
            let seed = instance_seed(&cfg, 1);
            let inst = generate_instance(&cfg, seed)?;
            let sol = centralized_oracle(&inst.problem, &inst.anchor, OracleBudget::new(budget))?;
            print(&json!({ "instance_seed": seed, "solution": sol }));
        }
        Command::Validate(common) => {
            let cfg = load(&common)?;
            let report = harness::validate_config(&cfg)?;
            print(&report);
            if !report.valid {
                return Ok(ExitCode::from(2));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(code) => code,
        Err(e) => {
            let report = json!({ "error": { "kind": e.kind(), "message": e.to_string() } });
            eprintln!("{report}");
            ExitCode::FAILURE
        }
    }
}
