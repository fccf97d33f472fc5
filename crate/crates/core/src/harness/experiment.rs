//! Monte-Carlo orchestration: samplings, averaging, schedule comparison.

use rayon::prelude::*;
use serde::Serialize;

use crate::algorithms::{run, AlgorithmKind, RunOptions};
use crate::convex_ops::StepSizeSchedule;
use crate::error::{Error, Result};
use crate::harness::config::ExperimentConfig;
use crate::harness::generate::{generate_instance, GeneratedInstance};
use crate::harness::validate_config;
use crate::metrics::{group_aggregates, GroupAggregate, MetricsRecord};
use crate::sampler::derive_seed;

/// Seed of the instance used by sampling `s` (1-based).
pub fn instance_seed(config: &ExperimentConfig, sampling: u64) -> u64 {
    let index = if config.experiment.reuse_instance { 0 } else { sampling };
    derive_seed(config.experiment.seed, index)
}

/// Seed of the initial points and constraint draws of sampling `s` (1-based).
pub fn sampling_seed(config: &ExperimentConfig, sampling: u64) -> u64 {
    derive_seed(config.experiment.seed, sampling)
}

#[derive(Debug, Clone)]
pub struct SamplingResult {
    /// 1-based.
    pub sampling: u64,
    pub seed: u64,
    pub instance: GeneratedInstance,
    pub records: Vec<MetricsRecord>,
    pub final_estimates: Vec<Vec<f64>>,
}

impl SamplingResult {
    pub fn record_at(&self, k: u64) -> Option<&MetricsRecord> {
        self.records.iter().find(|r| r.k == k)
    }

    pub fn final_record(&self) -> &MetricsRecord {
        self.records.last().expect("every run records its final iteration")
    }

    /// Mean of the final estimates of all users.
    pub fn average_estimate(&self) -> Vec<f64> {
        let m = self.final_estimates.len() as f64;
        let mut avg = vec![0.0; self.final_estimates[0].len()];
        for x in &self.final_estimates {
            for (a, v) in avg.iter_mut().zip(x) {
                *a += v;
            }
        }
        avg.iter_mut().for_each(|a| *a /= m);
        avg
    }
}

/// Per-user measures averaged over samplings at one recorded iteration.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MeanRecord {
    pub k: u64,
    pub objective: Vec<f64>,
    pub feasibility: Vec<f64>,
    pub consensus_diameter: f64,
}

#[derive(Debug, Clone)]
pub struct ExperimentResult {
    pub config: ExperimentConfig,
    pub samplings: Vec<SamplingResult>,
    pub mean: Vec<MeanRecord>,
}

impl ExperimentResult {
    pub fn final_mean(&self) -> &MeanRecord {
        self.mean.last().expect("at least one recorded iteration")
    }

    /// Group table at the final iteration from the sampling-averaged values.
    /// Users are grouped in triples when the count allows, otherwise each
    /// user is its own group.
    pub fn final_groups(&self) -> Vec<GroupAggregate> {
        let last = self.final_mean();
        report_groups(&last.objective, &last.feasibility)
    }
}

pub(crate) fn report_groups(objective: &[f64], feasibility: &[f64]) -> Vec<GroupAggregate> {
    group_aggregates(objective, feasibility).unwrap_or_else(|_| {
        objective
            .iter()
            .zip(feasibility)
            .enumerate()
            .map(|(i, (f, d))| GroupAggregate {
                group: i + 1,
                members: vec![i + 1],
                objective: *f,
                feasibility: *d,
            })
            .collect()
    })
}

/// Runs every sampling in memory. Samplings execute in parallel; results are
/// identical for any thread count.
pub fn execute_experiment(config: &ExperimentConfig) -> Result<ExperimentResult> {
    config.check()?;
    let report = validate_config(config)?;
    if !report.valid {
        return Err(Error::Config(format!(
            "network fails validation: {}",
            report.describe()
        )));
    }
    let (_, w, _) = config.network.build(config.problem.users)?;
    let schedule = config.algorithm.schedule()?;
    let shared = if config.experiment.reuse_instance {
        Some(generate_instance(config, instance_seed(config, 1))?)
    } else {
        None
    };

    let samplings: Vec<SamplingResult> = (1..=config.experiment.samplings)
        .into_par_iter()
        .map(|s| {
            let instance = match &shared {
                Some(inst) => inst.clone(),
                None => generate_instance(config, instance_seed(config, s))?,
            };
            let seed = sampling_seed(config, s);
            let options = RunOptions {
                kind: config.algorithm.kind,
                schedule,
                iterations: config.algorithm.iterations,
                initial_box: (config.generation.initial_box[0], config.generation.initial_box[1]),
                seed,
                record_every: config.algorithm.record_every,
                sampling: s,
            };
            let traj = run(&instance.problem, &w, &options)?;
            Ok(SamplingResult {
                sampling: s,
                seed,
                instance,
                records: traj.records,
                final_estimates: traj.final_state.estimates().to_vec(),
            })
        })
        .collect::<Result<_>>()?;

    let mean = average_records(&samplings);
    Ok(ExperimentResult {
        config: config.clone(),
        samplings,
        mean,
    })
}

fn average_records(samplings: &[SamplingResult]) -> Vec<MeanRecord> {
    let n = samplings.len() as f64;
    let first = &samplings[0].records;
    (0..first.len())
        .map(|r| {
            let m = first[r].objective.len();
            let mut objective = vec![0.0; m];
            let mut feasibility = vec![0.0; m];
            let mut diameter = 0.0;
            for s in samplings {
                let rec = &s.records[r];
                for i in 0..m {
                    objective[i] += rec.objective[i];
                    feasibility[i] += rec.feasibility[i];
                }
                diameter += rec.consensus_diameter;
            }
            objective.iter_mut().for_each(|v| *v /= n);
            feasibility.iter_mut().for_each(|v| *v /= n);
            MeanRecord {
                k: first[r].k,
                objective,
                feasibility,
                consensus_diameter: diameter / n,
            }
        })
        .collect()
}

/// One column pair of a schedule comparison.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScheduleColumn {
    pub label: String,
    pub base: f64,
    pub exponent: f64,
    pub groups: Vec<GroupAggregate>,
}

impl ScheduleColumn {
    pub fn total_objective(&self) -> f64 {
        self.groups.iter().map(|g| g.objective).sum()
    }

    pub fn total_feasibility(&self) -> f64 {
        self.groups.iter().map(|g| g.feasibility).sum()
    }
}

#[derive(Debug, Clone)]
pub struct ScheduleComparison {
    pub algorithm: AlgorithmKind,
    pub columns: Vec<ScheduleColumn>,
    pub results: Vec<ExperimentResult>,
}

/// `1/(k+1)`, `0.001/(k+1)`, `0.5/(k+1)^0.75`.
pub fn schedule_label(s: &StepSizeSchedule) -> String {
    if s.exponent() == 1.0 {
        format!("{}/(k+1)", s.base())
    } else {
        format!("{}/(k+1)^{}", s.base(), s.exponent())
    }
}

/// Runs the same experiment once per schedule. Instances and initial points
/// depend only on the master seed, so every column sees identical data.
pub fn compare_schedules(
    config: &ExperimentConfig,
    schedules: &[StepSizeSchedule],
) -> Result<ScheduleComparison> {
    if schedules.len() < 2 {
        return Err(Error::Input("schedule comparison needs at least two schedules".into()));
    }
    let mut columns = Vec::with_capacity(schedules.len());
    let mut results = Vec::with_capacity(schedules.len());
    for s in schedules {
        let mut cfg = config.clone();
        cfg.algorithm.step_base = s.base();
        cfg.algorithm.step_exponent = s.exponent();
        let result = execute_experiment(&cfg)?;
        columns.push(ScheduleColumn {
            label: schedule_label(s),
            base: s.base(),
            exponent: s.exponent(),
            groups: result.final_groups(),
        });
        results.push(result);
    }
    Ok(ScheduleComparison {
        algorithm: config.algorithm.kind,
        columns,
        results,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(kind: AlgorithmKind) -> ExperimentConfig {
        let mut c = ExperimentConfig::new(3, 6, kind, 0.5, 20, 3, 99);
        c.algorithm.record_every = 5;
        c
    }

    #[test]
    fn samplings_share_instance_but_not_start() {
        let r = execute_experiment(&small(AlgorithmKind::Proximal)).unwrap();
        assert_eq!(r.samplings.len(), 3);
        assert_eq!(r.samplings[0].instance.problem, r.samplings[2].instance.problem);
        assert_ne!(r.samplings[0].records[0], r.samplings[1].records[0]);
        assert_eq!(r.mean.iter().map(|m| m.k).collect::<Vec<_>>(), vec![0, 5, 10, 15, 20]);
    }

    #[test]
    fn fresh_instances_when_not_reused() {
        let mut c = small(AlgorithmKind::Subgradient);
        c.experiment.reuse_instance = false;
        let r = execute_experiment(&c).unwrap();
        assert_ne!(r.samplings[0].instance.problem, r.samplings[1].instance.problem);
    }

    #[test]
    fn mean_is_sampling_average() {
        let r = execute_experiment(&small(AlgorithmKind::Proximal)).unwrap();
        let last = r.final_mean();
        let direct: f64 = r.samplings.iter().map(|s| s.final_record().feasibility[2]).sum::<f64>() / 3.0;
        assert!((last.feasibility[2] - direct).abs() < 1e-15);
        let groups = r.final_groups();
        assert_eq!(groups.len(), 2);
        let total: f64 = last.objective.iter().sum();
        let grouped: f64 = groups.iter().map(|g| g.objective).sum();
        assert!((total - grouped).abs() < 1e-12);
    }

    #[test]
    fn identical_schedules_give_identical_columns() {
        let s = StepSizeSchedule::harmonic(0.5).unwrap();
        let cmp = compare_schedules(&small(AlgorithmKind::Proximal), &[s, s]).unwrap();
        assert_eq!(cmp.columns[0].groups, cmp.columns[1].groups);
        assert!(compare_schedules(&small(AlgorithmKind::Proximal), &[s]).is_err());
    }

    #[test]
    fn labels() {
        assert_eq!(schedule_label(&StepSizeSchedule::harmonic(1.0).unwrap()), "1/(k+1)");
        assert_eq!(schedule_label(&StepSizeSchedule::harmonic(0.001).unwrap()), "0.001/(k+1)");
        assert_eq!(
            schedule_label(&StepSizeSchedule::new(0.5, 0.75).unwrap()),
            "0.5/(k+1)^0.75"
        );
    }
}
