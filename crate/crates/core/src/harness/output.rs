//! CSV and JSON writers.
//!
//! All CSV files use LF line endings, end with a newline, and print floats
//! with 17 significant digits (`{:.16e}`), so identical runs produce
//! identical bytes.
//!
//! | file             | header                          |
//! |------------------|---------------------------------|
//! | `trajectory.csv` | `sampling,k,user,F,D`           |
//! | `summary.csv`    | `k,user,F,D` (sampling means)   |
//! | `groups.csv`     | `group,F_G,D_G` at the last `k` |
//! | `comparison.csv` | `group,F_G[label],D_G[label],...` |

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::harness::experiment::{ExperimentResult, ScheduleComparison};
use crate::metrics::GroupAggregate;

pub const TRAJECTORY_HEADER: &str = "sampling,k,user,F,D";
pub const SUMMARY_HEADER: &str = "k,user,F,D";
pub const GROUP_HEADER: &str = "group,F_G,D_G";

/// 17 significant digits.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

struct CsvFile {
    path: PathBuf,
    out: BufWriter<File>,
}

impl CsvFile {
    fn create(path: PathBuf, header: &str) -> Result<Self> {
        let file = File::create(&path).map_err(|e| Error::io(&path, e))?;
        let mut f = Self {
            path,
            out: BufWriter::new(file),
        };
        f.line(header)?;
        Ok(f)
    }

    fn line(&mut self, text: &str) -> Result<()> {
        self.out
            .write_all(text.as_bytes())
            .and_then(|_| self.out.write_all(b"\n"))
            .map_err(|e| Error::io(&self.path, e))
    }

    fn finish(mut self) -> Result<PathBuf> {
        self.out.flush().map_err(|e| Error::io(&self.path, e))?;
        Ok(self.path)
    }
}

fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

pub fn write_trajectory(result: &ExperimentResult, path: PathBuf) -> Result<PathBuf> {
    let mut csv = CsvFile::create(path, TRAJECTORY_HEADER)?;
    for s in &result.samplings {
        for rec in &s.records {
            for (i, (f, d)) in rec.objective.iter().zip(&rec.feasibility).enumerate() {
                csv.line(&format!("{},{},{},{},{}", s.sampling, rec.k, i + 1, fmt_f64(*f), fmt_f64(*d)))?;
            }
        }
    }
    csv.finish()
}

pub fn write_summary(result: &ExperimentResult, path: PathBuf) -> Result<PathBuf> {
    let mut csv = CsvFile::create(path, SUMMARY_HEADER)?;
    for rec in &result.mean {
        for (i, (f, d)) in rec.objective.iter().zip(&rec.feasibility).enumerate() {
            csv.line(&format!("{},{},{},{}", rec.k, i + 1, fmt_f64(*f), fmt_f64(*d)))?;
        }
    }
    csv.finish()
}

pub fn write_groups(groups: &[GroupAggregate], path: PathBuf) -> Result<PathBuf> {
    let mut csv = CsvFile::create(path, GROUP_HEADER)?;
    for g in groups {
        csv.line(&format!("{},{},{}", g.group, fmt_f64(g.objective), fmt_f64(g.feasibility)))?;
    }
    csv.finish()
}

pub fn write_comparison(cmp: &ScheduleComparison, path: PathBuf) -> Result<PathBuf> {
    let mut header = String::from("group");
    for c in &cmp.columns {
        header.push_str(&format!(",F_G[{0}],D_G[{0}]", c.label));
    }
    let mut csv = CsvFile::create(path, &header)?;
    let rows = cmp.columns[0].groups.len();
    for r in 0..rows {
        let mut line = cmp.columns[0].groups[r].group.to_string();
        for c in &cmp.columns {
            let g = &c.groups[r];
            line.push(',');
            line.push_str(&fmt_f64(g.objective));
            line.push(',');
            line.push_str(&fmt_f64(g.feasibility));
        }
        csv.line(&line)?;
    }
    csv.finish()
}

pub fn write_json<T: Serialize>(value: &T, path: PathBuf) -> Result<PathBuf> {
    let text = serde_json::to_string_pretty(value)
        .map_err(|e| Error::Config(format!("cannot serialize {}: {e}", path.display())))?;
    fs::write(&path, text + "\n").map_err(|e| Error::io(&path, e))?;
    Ok(path)
}

#[derive(Debug, Clone, Serialize)]
pub struct RunSummary {
    pub algorithm: String,
    pub step_base: f64,
    pub step_exponent: f64,
    pub iterations: u64,
    pub samplings: u64,
    pub seed: u64,
    pub dimension: usize,
    pub users: usize,
    pub sampling_seeds: Vec<u64>,
    /// Means over samplings at the final iteration.
    pub final_total_objective: f64,
    pub final_total_feasibility: f64,
    pub final_consensus_diameter: f64,
    pub groups: Vec<GroupAggregate>,
    pub files: Vec<PathBuf>,
}

impl RunSummary {
    pub fn new(result: &ExperimentResult, files: Vec<PathBuf>) -> Self {
        let c = &result.config;
        let last = result.final_mean();
        Self {
            algorithm: c.algorithm.kind.to_string(),
            step_base: c.algorithm.step_base,
            step_exponent: c.algorithm.step_exponent,
            iterations: c.algorithm.iterations,
            samplings: c.experiment.samplings,
            seed: c.experiment.seed,
            dimension: c.problem.dimension,
            users: c.problem.users,
            sampling_seeds: result.samplings.iter().map(|s| s.seed).collect(),
            final_total_objective: last.objective.iter().sum(),
            final_total_feasibility: last.feasibility.iter().sum(),
            final_consensus_diameter: last.consensus_diameter,
            groups: result.final_groups(),
            files,
        }
    }
}

/// Writes `trajectory.csv`, `summary.csv`, `groups.csv` and `run.json` into
/// `dir`. Files already written stay on disk if a later one fails.
pub fn write_experiment(result: &ExperimentResult, dir: &Path) -> Result<RunSummary> {
    ensure_dir(dir)?;
    let files = vec![
        write_trajectory(result, dir.join("trajectory.csv"))?,
        write_summary(result, dir.join("summary.csv"))?,
        write_groups(&result.final_groups(), dir.join("groups.csv"))?,
    ];
    let mut summary = RunSummary::new(result, files);
    summary.files.push(dir.join("run.json"));
    write_json(&summary, dir.join("run.json"))?;
    Ok(summary)
}

#[derive(Debug, Clone, Serialize)]
pub struct ComparisonSummary {
    pub algorithm: String,
    pub columns: Vec<ColumnSummary>,
    pub files: Vec<PathBuf>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ColumnSummary {
    pub label: String,
    pub total_objective: f64,
    pub total_feasibility: f64,
}

/// One subdirectory per schedule (`schedule_1`, ...) plus `comparison.csv`
/// and `comparison.json`.
pub fn write_schedule_comparison(cmp: &ScheduleComparison, dir: &Path) -> Result<ComparisonSummary> {
    ensure_dir(dir)?;
    let mut files = Vec::new();
    for (n, result) in cmp.results.iter().enumerate() {
        let sub = dir.join(format!("schedule_{}", n + 1));
        files.extend(write_experiment(result, &sub)?.files);
    }
    files.push(write_comparison(cmp, dir.join("comparison.csv"))?);
    files.push(dir.join("comparison.json"));
    let summary = ComparisonSummary {
        algorithm: cmp.algorithm.to_string(),
        columns: cmp
            .columns
            .iter()
            .map(|c| ColumnSummary {
                label: c.label.clone(),
                total_objective: c.total_objective(),
                total_feasibility: c.total_feasibility(),
            })
            .collect(),
        files,
    };
    write_json(&summary, dir.join("comparison.json"))?;
    Ok(summary)
}
