//! Both algorithms on a 12-user, 10-dimensional instance for 5e4 rounds,
//! compared with the centralized reference solver.
//!
//! ```bash
//! cargo run --release --example desk_scale_convergence
//! ```

use randproj::algorithms::{run, RunOptions};
use randproj::harness::{centralized_oracle, generate_instance, OracleBudget};
use randproj::network::{build_ring_of_cliques, ring_of_cliques_weights};
use randproj::sampler::derive_seed;
use randproj::{AlgorithmKind, ExperimentConfig, StepSizeSchedule};

fn main() -> randproj::Result<()> {
    let (d, m, iterations) = (10, 12, 50_000);
    let schedule = StepSizeSchedule::harmonic(0.1)?;
    let topology = build_ring_of_cliques(m)?;
    let w = ring_of_cliques_weights(&topology)?;
    let config = ExperimentConfig::new(d, m, AlgorithmKind::Proximal, 0.1, iterations, 1, 0);

    for seed in 1..=3u64 {
        let inst = generate_instance(&config, derive_seed(seed, 0))?;
        let oracle = centralized_oracle(&inst.problem, &inst.anchor, OracleBudget::new(1_000_000))?;
        println!("seed {seed}: oracle f* = {:.6}", oracle.value);
        for kind in [AlgorithmKind::Proximal, AlgorithmKind::Subgradient] {
            let mut opts = RunOptions::new(kind, schedule, iterations, derive_seed(seed, 1));
            opts.record_every = 10;
            let traj = run(&inst.problem, &w, &opts)?;
            let first = &traj.records[0];
            let last = traj.records.last().unwrap();
            let avg = traj.final_state.average_estimate();
            let f = inst.problem.total_objective(&avg)?;
            println!(
                "  {kind:<11} diameter {:.3e} -> {:.3e}  sum D {:.3e}  f(avg) {:.6} ({:+.3}% vs f*)",
                first.consensus_diameter,
                last.consensus_diameter,
                last.total_feasibility(),
                f,
                100.0 * (f - oracle.value) / oracle.value
            );
        }
    }
    Ok(())
}
