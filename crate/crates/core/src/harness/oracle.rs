//! Centralized reference solver used to check the distributed runs.
//!
//! Plain projected subgradient on the full sum `f = sum_i f_i`, where the
//! projection onto the intersection is replaced by cyclic projections over
//! every component until the point is feasible. Each ball projection is
//! nonexpansive toward any point of the intersection, so the usual
//! best-iterate bound of the subgradient method still applies. Only the
//! closed-form primitives of [`crate::convex_ops`] are used.

use serde::Serialize;

use crate::algorithms::ProblemInstance;
use crate::error::{check_dim, Error, Result};

/// Feasibility target of the restoration step.
pub const ORACLE_FEASIBILITY_TOL: f64 = 1e-10;
/// Sweep cap of a single restoration.
pub const ORACLE_MAX_SWEEPS: usize = 100_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleBudget {
    pub iterations: u64,
    /// Step `c / sqrt(k + 1)`; `None` uses `1 / sum_i |a_i|_2`.
    pub step_scale: Option<f64>,
}

impl OracleBudget {
    pub fn new(iterations: u64) -> Self {
        Self {
            iterations,
            step_scale: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleSolution {
    /// Best objective value seen at a feasible iterate.
    pub value: f64,
    pub minimizer: Vec<f64>,
    pub method: &'static str,
    pub iterations: u64,
    pub step_scale: f64,
    /// `max_j (|x - c_j| - r_j)^+` at the minimizer.
    pub max_violation: f64,
    /// Most sweeps any single restoration needed.
    pub max_restoration_sweeps: usize,
}

/// Cyclic projections over every component until the largest violation is
/// at most `tol`. Returns the sweep count.
pub fn restore_feasibility(problem: &ProblemInstance, x: &mut [f64], tol: f64) -> Result<usize> {
    let mut sweeps = 0;
    while problem.max_violation(x) > tol {
        if sweeps == ORACLE_MAX_SWEEPS {
            return Err(Error::Infeasible(format!(
                "violation {:.3e} remains after {sweeps} sweeps",
                problem.max_violation(x)
            )));
        }
        for ball in problem.components() {
            ball.project_in_place(x);
        }
        sweeps += 1;
    }
    Ok(sweeps)
}

pub fn centralized_oracle(
    problem: &ProblemInstance,
    start: &[f64],
    budget: OracleBudget,
) -> Result<OracleSolution> {
    check_dim(problem.dim(), start.len(), "oracle start")?;
    let d = problem.dim();
    let c = match budget.step_scale {
        Some(c) if c > 0.0 => c,
        Some(c) => return Err(Error::Input(format!("oracle step scale must be positive, got {c}"))),
        None => {
            let g: f64 = problem.objectives().iter().map(|f| f.subgradient_bound()).sum();
            if g > 0.0 {
                1.0 / g
            } else {
                1.0
            }
        }
    };

    let mut x = start.to_vec();
    let mut max_sweeps = restore_feasibility(problem, &mut x, ORACLE_FEASIBILITY_TOL)?;
    let mut best = x.clone();
    let mut best_value = problem.total_objective(&x)?;
    let mut g = vec![0.0; d];
    let mut gi = vec![0.0; d];

    for k in 0..budget.iterations {
        g.iter_mut().for_each(|v| *v = 0.0);
        for f in problem.objectives() {
            f.subgradient_into(&x, &mut gi);
            for (a, b) in g.iter_mut().zip(&gi) {
                *a += b;
            }
        }
        if g.iter().all(|v| *v == 0.0) {
            break;
        }
        let step = c / ((k + 1) as f64).sqrt();
        for (xi, gi) in x.iter_mut().zip(&g) {
            *xi -= step * gi;
        }
        max_sweeps = max_sweeps.max(restore_feasibility(problem, &mut x, ORACLE_FEASIBILITY_TOL)?);
        let v = problem.total_objective(&x)?;
        if v < best_value {
            best_value = v;
            best.copy_from_slice(&x);
        }
    }

    Ok(OracleSolution {
        value: best_value,
        max_violation: problem.max_violation(&best),
        minimizer: best,
        method: "projected subgradient with cyclic feasibility restoration",
        iterations: budget.iterations,
        step_scale: c,
        max_restoration_sweeps: max_sweeps,
    })
}
