//! One seeded run of either algorithm on a generated instance, printing the
//! recorded measures.
//!
//! ```bash
//! cargo run --release --example single_run -- subgradient
//! ```

use randproj::algorithms::{run, RunOptions};
use randproj::harness::generate_instance;
use randproj::network::{build_ring_of_cliques, ring_of_cliques_weights};
use randproj::{AlgorithmKind, ExperimentConfig, StepSizeSchedule};

fn main() -> randproj::Result<()> {
    let kind: AlgorithmKind = std::env::args().nth(1).as_deref().unwrap_or("proximal").parse()?;
    let config = ExperimentConfig::new(20, 12, kind, 0.1, 2000, 1, 42);
    let inst = generate_instance(&config, 42)?;
    let w = ring_of_cliques_weights(&build_ring_of_cliques(12)?)?;

    let mut opts = RunOptions::new(kind, StepSizeSchedule::harmonic(0.1)?, 2000, 42);
    opts.record_every = 250;
    let traj = run(&inst.problem, &w, &opts)?;

    println!("{kind}: d = 20, m = 12, alpha_k = 0.1/(k+1)");
    println!("{:>6} {:>12} {:>12} {:>12}", "k", "sum F", "sum D", "diameter");
    for r in &traj.records {
        println!(
            "{:>6} {:>12.4} {:>12.3e} {:>12.3e}",
            r.k,
            r.total_objective(),
            r.total_feasibility(),
            r.consensus_diameter
        );
    }
    let avg = traj.final_state.average_estimate();
    println!("f(average estimate) = {:.6}", inst.problem.total_objective(&avg)?);
    Ok(())
}
