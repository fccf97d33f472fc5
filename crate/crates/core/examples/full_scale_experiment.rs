//! The 48-user, 100-dimensional experiment: both algorithms, both schedules,
//! 100 samplings each. Writes CSV tables under `out/full_scale_experiment/`.
//!
//! ```bash
//! cargo run --release --example full_scale_experiment
//! ```

use std::path::Path;

use randproj::harness::run_comparison;
use randproj::{AlgorithmKind, ExperimentConfig, StepSizeSchedule};

fn main() -> randproj::Result<()> {
    let config_path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs/ring48.toml");
    let mut config = ExperimentConfig::load(&config_path)?;
    let schedules = [StepSizeSchedule::harmonic(1.0)?, StepSizeSchedule::harmonic(1e-3)?];

    for kind in [AlgorithmKind::Subgradient, AlgorithmKind::Proximal] {
        config.algorithm.kind = kind;
        let dir = Path::new("out/full_scale_experiment").join(kind.name());
        let summary = run_comparison(&config, &schedules, &dir)?;
        for c in &summary.columns {
            println!(
                "{kind:<11} {:<12} sum F_G {:>10.3}  sum D_G {:.4e}",
                c.label, c.total_objective, c.total_feasibility
            );
        }
        println!("  tables in {}", dir.display());
    }
    Ok(())
}
