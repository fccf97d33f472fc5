//! Per-iteration performance measures.
//!
//! `D_i(k)` is the distance moved by one ordered pass of projections onto
//! user `i`'s components (ascending component index), `F_i(k) = f_i(x_i(k))`.
//! Users are grouped in triples `{3t-1, 3t, 3t+1 mod m}` (1-based) for the
//! group tables.

use serde::Serialize;

use crate::algorithms::ProblemInstance;
use crate::convex_ops::dist;
use crate::error::{Error, Result};

/// Declared stopping tolerance of the cyclic-projection distance proxy.
pub const DISTANCE_PROXY_TOL: f64 = 1e-10;
/// Declared sweep cap of the cyclic-projection distance proxy.
pub const DISTANCE_PROXY_MAX_SWEEPS: usize = 10_000;

/// `|x - P_{n_i} ... P_{1}(x)|` over user `i`'s components in ascending order.
pub fn feasibility_measure(problem: &ProblemInstance, i: usize, x: &[f64]) -> f64 {
    let mut p = x.to_vec();
    for ball in problem.user_components(i) {
        ball.project_in_place(&mut p);
    }
    dist(x, &p)
}

pub fn objective_measure(problem: &ProblemInstance, i: usize, x: &[f64]) -> f64 {
    problem.objective(i).eval_unchecked(x)
}

/// Largest pairwise distance among the estimates.
pub fn consensus_diameter(estimates: &[Vec<f64>]) -> f64 {
    let mut best: f64 = 0.0;
    for (i, x) in estimates.iter().enumerate() {
        for y in &estimates[i + 1..] {
            best = best.max(dist(x, y));
        }
    }
    best
}

/// 0-based members of every user group; group `t` (1-based) is
/// `{3t-1, 3t, 3t+1 mod m}` in 1-based user numbers.
pub fn user_groups(m: usize) -> Result<Vec<[usize; 3]>> {
    if m == 0 || !m.is_multiple_of(3) {
        return Err(Error::Config(format!(
            "user groups need a user count divisible by 3, got {m}"
        )));
    }
    Ok((0..m / 3).map(|t| [3 * t + 1, 3 * t + 2, (3 * t + 3) % m]).collect())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GroupAggregate {
    /// 1-based group number.
    pub group: usize,
    /// 1-based user numbers.
    pub members: Vec<usize>,
    pub objective: f64,
    pub feasibility: f64,
}

/// `(F_G, D_G)` for every group, from per-user values `objective[i]`,
/// `feasibility[i]`.
pub fn group_aggregates(objective: &[f64], feasibility: &[f64]) -> Result<Vec<GroupAggregate>> {
    if objective.len() != feasibility.len() {
        return Err(Error::Input("objective and feasibility lengths differ".into()));
    }
    Ok(user_groups(objective.len())?
        .into_iter()
        .enumerate()
        .map(|(t, g)| GroupAggregate {
            group: t + 1,
            members: g.iter().map(|i| i + 1).collect(),
            objective: g.iter().map(|&i| objective[i]).sum(),
            feasibility: g.iter().map(|&i| feasibility[i]).sum(),
        })
        .collect())
}

/// Measures of all users at one recorded iteration.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricsRecord {
    pub sampling: u64,
    pub k: u64,
    /// `D_i(k)` indexed by 0-based user.
    pub feasibility: Vec<f64>,
    /// `F_i(k)` indexed by 0-based user.
    pub objective: Vec<f64>,
    pub consensus_diameter: f64,
}

impl MetricsRecord {
    pub fn measure(problem: &ProblemInstance, estimates: &[Vec<f64>], k: u64, sampling: u64) -> Self {
        let feasibility = estimates
            .iter()
            .enumerate()
            .map(|(i, x)| feasibility_measure(problem, i, x))
            .collect();
        let objective = estimates
            .iter()
            .enumerate()
            .map(|(i, x)| objective_measure(problem, i, x))
            .collect();
        Self {
            sampling,
            k,
            feasibility,
            objective,
            consensus_diameter: consensus_diameter(estimates),
        }
    }

    pub fn total_feasibility(&self) -> f64 {
        self.feasibility.iter().sum()
    }

    pub fn total_squared_feasibility(&self) -> f64 {
        self.feasibility.iter().map(|d| d * d).sum()
    }

    pub fn total_objective(&self) -> f64 {
        self.objective.iter().sum()
    }

    pub fn group_aggregates(&self) -> Result<Vec<GroupAggregate>> {
        group_aggregates(&self.objective, &self.feasibility)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DistanceEstimate {
    /// `|x - limit|`; an upper bound on `d(x, X)` only up to the gap between
    /// the cyclic-projection limit and the true projection.
    pub value: f64,
    /// Last iterate of the sweeps. Never farther from any point of the
    /// intersection than `x` or any earlier iterate.
    pub limit: Vec<f64>,
    pub sweeps: usize,
    pub converged: bool,
}

/// Cyclic projections over every component of every user starting from `x`,
/// stopped once a full sweep moves the point by less than `tol`.
pub fn approx_distance_to_intersection(
    problem: &ProblemInstance,
    x: &[f64],
    tol: f64,
    max_sweeps: usize,
) -> Result<DistanceEstimate> {
    if !(tol > 0.0) {
        return Err(Error::Input(format!("tolerance must be positive, got {tol}")));
    }
    crate::error::check_dim(problem.dim(), x.len(), "point")?;
    let mut p = x.to_vec();
    let mut prev = p.clone();
    let mut sweeps = 0;
    let mut converged = false;
    while sweeps < max_sweeps {
        for ball in problem.components() {
            ball.project_in_place(&mut p);
        }
        sweeps += 1;
        if dist(&p, &prev) < tol {
            converged = true;
            break;
        }
        prev.copy_from_slice(&p);
    }
    Ok(DistanceEstimate {
        value: dist(x, &p),
        limit: p,
        sweeps,
        converged,
    })
}
