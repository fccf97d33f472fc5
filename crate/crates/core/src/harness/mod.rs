//! Experiment generation, orchestration, the centralized reference solver
//! and file output.

pub mod config;
pub mod experiment;
pub mod generate;
pub mod oracle;
pub mod output;

use std::path::Path;

use serde::Serialize;

use crate::error::Result;
use crate::network::{check_strong_connectivity, validate_weights, WeightReport};

pub use config::{ExperimentConfig, NetworkSpec};
pub use experiment::{compare_schedules, execute_experiment, ExperimentResult, ScheduleComparison};
pub use generate::{generate_instance, GeneratedInstance};
pub use oracle::{centralized_oracle, OracleBudget, OracleSolution};
pub use output::{write_experiment, write_schedule_comparison, ComparisonSummary, RunSummary};

/// Outcome of the network and step-size checks on a config.
#[derive(Debug, Clone, Serialize)]
pub struct ValidationReport {
    pub users: usize,
    pub w_min: f64,
    pub weights: WeightReport,
    /// Window length used for the connectivity check. The harness runs a
    /// static network, so one graph per window suffices.
    pub window: usize,
    pub strongly_connected: bool,
    pub step_base: f64,
    pub step_exponent: f64,
    pub valid: bool,
}

impl ValidationReport {
    pub fn describe(&self) -> String {
        let mut parts: Vec<String> = self.weights.violations.iter().map(|v| v.to_string()).collect();
        if !self.strongly_connected {
            parts.push("network is not strongly connected".into());
        }
        if parts.is_empty() {
            "ok".into()
        } else {
            parts.join("; ")
        }
    }
}

/// Checks the weight matrix (sparsity, lower bound, double stochasticity)
/// and strong connectivity of the configured network.
pub fn validate_config(config: &ExperimentConfig) -> Result<ValidationReport> {
    config.check()?;
    let (topology, w, w_min) = config.network.build(config.problem.users)?;
    let weights = validate_weights(&w, &topology, w_min)?;
    let strongly_connected = check_strong_connectivity(std::slice::from_ref(&topology), 1)?;
    let valid = weights.is_valid() && strongly_connected;
    Ok(ValidationReport {
        users: topology.users(),
        w_min,
        weights,
        window: 1,
        strongly_connected,
        step_base: config.algorithm.step_base,
        step_exponent: config.algorithm.step_exponent,
        valid,
    })
}

/// Runs the experiment and writes its files into `config.output.dir`.
pub fn run_experiment(config: &ExperimentConfig) -> Result<RunSummary> {
    let result = execute_experiment(config)?;
    write_experiment(&result, &config.output.dir)
}

/// Runs one experiment per schedule and writes the side-by-side table into
/// `dir`.
pub fn run_comparison(
    config: &ExperimentConfig,
    schedules: &[crate::convex_ops::StepSizeSchedule],
    dir: &Path,
) -> Result<ComparisonSummary> {
    let cmp = compare_schedules(config, schedules)?;
    write_schedule_comparison(&cmp, dir)
}
