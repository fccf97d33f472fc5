//! Side-by-side group table for two step-size schedules with paired seeds.

use randproj::harness::compare_schedules;
use randproj::{AlgorithmKind, ExperimentConfig, StepSizeSchedule};

fn main() -> randproj::Result<()> {
    let mut config = ExperimentConfig::new(20, 12, AlgorithmKind::Proximal, 1.0, 1000, 10, 2024);
    config.algorithm.record_every = 1000;
    let schedules = [StepSizeSchedule::harmonic(1.0)?, StepSizeSchedule::harmonic(1e-3)?];

    for kind in [AlgorithmKind::Proximal, AlgorithmKind::Subgradient] {
        config.algorithm.kind = kind;
        let cmp = compare_schedules(&config, &schedules)?;
        println!("{kind}");
        print!("{:>5}", "group");
        for c in &cmp.columns {
            print!(" {:>14} {:>12}", format!("F_G {}", c.label), "D_G");
        }
        println!();
        for r in 0..cmp.columns[0].groups.len() {
            print!("{:>5}", cmp.columns[0].groups[r].group);
            for c in &cmp.columns {
                print!(" {:>14.6} {:>12.6}", c.groups[r].objective, c.groups[r].feasibility);
            }
            println!();
        }
    }
    Ok(())
}
