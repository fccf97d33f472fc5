//! Reference optimum of a small instance from the centralized solver.

use randproj::harness::{centralized_oracle, generate_instance, OracleBudget};
use randproj::{AlgorithmKind, ExperimentConfig};

fn main() -> randproj::Result<()> {
    let config = ExperimentConfig::new(10, 12, AlgorithmKind::Proximal, 0.1, 1, 1, 3);
    let inst = generate_instance(&config, 3)?;
    for budget in [1_000, 10_000, 100_000] {
        let sol = centralized_oracle(&inst.problem, &inst.anchor, OracleBudget::new(budget))?;
        println!(
            "budget {budget:>7}: f* ~ {:.6}  violation {:.1e}  worst restoration {} sweeps",
            sol.value, sol.max_violation, sol.max_restoration_sweeps
        );
    }
    println!("f at the hidden anchor: {:.6}", inst.problem.total_objective(&inst.anchor)?);
    Ok(())
}
