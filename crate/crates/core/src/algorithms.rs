//! Synchronous round engines for the random projected proximal and
//! subgradient methods.
//!
//! One round, for every user `i` and the current step `alpha_k`:
//!
//! 1. `v_i = sum_j w_ij x_j(k)` (all users read the round-`k` snapshot),
//! 2. `p_i = prox_{alpha_k f_i}(v_i)` or `p_i = v_i - alpha_k g_i` with
//!    `g_i` a subgradient of `f_i` at `v_i`,
//! 3. draw one of the user's constraint components uniformly and set
//!    `x_i(k+1)` to the projection of `p_i` onto it.
//!
//! Users only touch their own slot during a round, so the per-user work may
//! run in parallel without changing a single bit of the result.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::convex_ops::{Ball, StepSizeSchedule, WeightedL1};
use crate::error::{check_dim, Error, Result};
use crate::metrics::MetricsRecord;
use crate::network::{mix_into, WeightMatrix, STOCHASTIC_TOL};
use crate::sampler::{sample_constraint, ConstraintPartition, RngStream, StreamPurpose};

/// Below this many coordinates per round the serial loop is faster.
const PARALLEL_ROUND_THRESHOLD: usize = 1 << 12;

/// Objectives and constraint components of all users.
#[derive(Debug, Clone, PartialEq)]
pub struct ProblemInstance {
    dim: usize,
    objectives: Vec<WeightedL1>,
    components: Vec<Ball>,
    partition: ConstraintPartition,
}

impl ProblemInstance {
    /// `components` is indexed globally; `partition` assigns each global
    /// index to exactly one user.
    pub fn new(
        objectives: Vec<WeightedL1>,
        components: Vec<Ball>,
        partition: ConstraintPartition,
    ) -> Result<Self> {
        let m = objectives.len();
        if m == 0 {
            return Err(Error::Config("problem needs at least one user".into()));
        }
        if partition.users() != m {
            return Err(Error::Config(format!(
                "partition covers {} users, objectives cover {m}",
                partition.users()
            )));
        }
        if partition.total() != components.len() {
            return Err(Error::Config(format!(
                "partition indexes {} components, {} given",
                partition.total(),
                components.len()
            )));
        }
        let dim = objectives[0].dim();
        for (i, f) in objectives.iter().enumerate() {
            if f.dim() != dim {
                return Err(Error::Config(format!("objective of user {} has the wrong dimension", i + 1)));
            }
        }
        for (j, b) in components.iter().enumerate() {
            if b.dim() != dim {
                return Err(Error::Config(format!("component {} has the wrong dimension", j + 1)));
            }
        }
        Ok(Self {
            dim,
            objectives,
            components,
            partition,
        })
    }

    /// One objective and a list of balls per user, partitioned contiguously.
    pub fn from_user_sets(users: Vec<(WeightedL1, Vec<Ball>)>) -> Result<Self> {
        let sizes: Vec<usize> = users.iter().map(|(_, balls)| balls.len()).collect();
        let partition = ConstraintPartition::contiguous(&sizes)?;
        let (objectives, balls): (Vec<_>, Vec<_>) = users.into_iter().unzip();
        Self::new(objectives, balls.into_iter().flatten().collect(), partition)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn users(&self) -> usize {
        self.objectives.len()
    }

    pub fn objective(&self, i: usize) -> &WeightedL1 {
        &self.objectives[i]
    }

    pub fn objectives(&self) -> &[WeightedL1] {
        &self.objectives
    }

    pub fn components(&self) -> &[Ball] {
        &self.components
    }

    pub fn partition(&self) -> &ConstraintPartition {
        &self.partition
    }

    /// User `i`'s components in ascending global index order.
    pub fn user_components(&self, i: usize) -> impl Iterator<Item = &Ball> + '_ {
        self.partition.members(i).iter().map(move |&j| &self.components[j])
    }

    /// `f(x) = sum_i f_i(x)`.
    pub fn total_objective(&self, x: &[f64]) -> Result<f64> {
        check_dim(self.dim, x.len(), "point")?;
        Ok(self.objectives.iter().map(|f| f.eval_unchecked(x)).sum())
    }

    /// Largest violation `max_j (|x - c_j| - r_j)^+` over every component.
    pub fn max_violation(&self, x: &[f64]) -> f64 {
        self.components.iter().map(|b| b.distance(x)).fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AlgorithmKind {
    /// Proximal step on the local objective.
    Proximal,
    /// Subgradient step on the local objective.
    Subgradient,
}

impl AlgorithmKind {
    pub fn name(self) -> &'static str {
        match self {
            AlgorithmKind::Proximal => "proximal",
            AlgorithmKind::Subgradient => "subgradient",
        }
    }
}

impl fmt::Display for AlgorithmKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.name())
    }
}

impl FromStr for AlgorithmKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "proximal" => Ok(AlgorithmKind::Proximal),
            "subgradient" => Ok(AlgorithmKind::Subgradient),
            other => Err(Error::Config(format!(
                "unknown algorithm {other:?}, expected proximal or subgradient"
            ))),
        }
    }
}

#[derive(Debug, Clone)]
struct UserSlot {
    next: Vec<f64>,
    averaged: Vec<f64>,
    draw: Option<usize>,
    stream: RngStream,
}

/// Estimates of all users plus the per-user constraint-draw streams.
#[derive(Debug, Clone)]
pub struct AlgorithmState {
    k: u64,
    estimates: Vec<Vec<f64>>,
    slots: Vec<UserSlot>,
}

impl AlgorithmState {
    /// Starts at `k = 0`. User `i` draws constraints from stream
    /// `(seed, i, ConstraintDraw)`.
    pub fn new(estimates: Vec<Vec<f64>>, seed: u64) -> Result<Self> {
        if estimates.is_empty() {
            return Err(Error::Input("state needs at least one user".into()));
        }
        let d = estimates[0].len();
        for x in &estimates {
            check_dim(d, x.len(), "initial estimate")?;
        }
        let slots = (0..estimates.len())
            .map(|i| UserSlot {
                next: vec![0.0; d],
                averaged: vec![0.0; d],
                draw: None,
                stream: RngStream::new(seed, i as u32, StreamPurpose::ConstraintDraw),
            })
            .collect();
        Ok(Self {
            k: 0,
            estimates,
            slots,
        })
    }

    /// Initial points uniform in `[lo, hi)^d`, user `i` drawing from stream
    /// `(seed, i, InitialPoint)`.
    pub fn random_start(users: usize, dim: usize, lo: f64, hi: f64, seed: u64) -> Result<Self> {
        if !(lo < hi) {
            return Err(Error::Config(format!("initial box [{lo}, {hi}) is empty")));
        }
        let estimates = (0..users)
            .map(|i| {
                let mut s = RngStream::new(seed, i as u32, StreamPurpose::InitialPoint);
                (0..dim).map(|_| s.uniform(lo, hi)).collect()
            })
            .collect();
        Self::new(estimates, seed)
    }

    pub fn iteration(&self) -> u64 {
        self.k
    }

    pub fn estimates(&self) -> &[Vec<f64>] {
        &self.estimates
    }

    /// `v_i(k)` of the last completed round.
    pub fn averaged(&self, i: usize) -> Option<&[f64]> {
        self.slots[i].draw.map(|_| self.slots[i].averaged.as_slice())
    }

    /// Global component index drawn by user `i` in the last completed round.
    pub fn last_draw(&self, i: usize) -> Option<usize> {
        self.slots[i].draw
    }

    /// `e_i(k) = x_i(k+1) - v_i(k)` for the last completed round.
    pub fn residual(&self, i: usize) -> Option<Vec<f64>> {
        self.averaged(i)
            .map(|v| self.estimates[i].iter().zip(v).map(|(x, v)| x - v).collect())
    }

    /// Mean of all estimates.
    pub fn average_estimate(&self) -> Vec<f64> {
        let m = self.estimates.len() as f64;
        let mut avg = vec![0.0; self.estimates[0].len()];
        for x in &self.estimates {
            for (a, xi) in avg.iter_mut().zip(x) {
                *a += xi;
            }
        }
        avg.iter_mut().for_each(|a| *a /= m);
        avg
    }
}

fn check_round_inputs(state: &AlgorithmState, problem: &ProblemInstance, w: &WeightMatrix) -> Result<()> {
    check_dim(problem.users(), state.estimates.len(), "user count of state")?;
    check_dim(problem.dim(), state.estimates[0].len(), "estimate")?;
    check_dim(problem.users(), w.users(), "weight matrix size")?;
    check_stochastic(w)
}

/// Nonnegativity and unit row and column sums.
pub(crate) fn check_stochastic(w: &WeightMatrix) -> Result<()> {
    let m = w.users();
    let mut cols = vec![0.0; m];
    for i in 0..m {
        let mut row = 0.0;
        for &(j, v) in w.row(i) {
            if v < 0.0 {
                return Err(Error::Config(format!("weight w[{},{}] is negative", i + 1, j + 1)));
            }
            row += v;
            cols[j] += v;
        }
        if (row - 1.0).abs() > STOCHASTIC_TOL {
            return Err(Error::Config(format!("weight row {} sums to {row}", i + 1)));
        }
    }
    if let Some(j) = cols.iter().position(|c| (c - 1.0).abs() > STOCHASTIC_TOL) {
        return Err(Error::Config(format!("weight column {} sums to {}", j + 1, cols[j])));
    }
    Ok(())
}

fn round_unchecked(
    kind: AlgorithmKind,
    state: &mut AlgorithmState,
    problem: &ProblemInstance,
    w: &WeightMatrix,
    schedule: &StepSizeSchedule,
) {
    let alpha = schedule.at(state.k);
    let estimates = &state.estimates;
    let step = |(i, slot): (usize, &mut UserSlot)| {
        mix_into(w, estimates, i, &mut slot.averaged);
        let f = &problem.objectives[i];
        match kind {
            AlgorithmKind::Proximal => f.prox_into(alpha, &slot.averaged, &mut slot.next),
            AlgorithmKind::Subgradient => {
                f.subgradient_into(&slot.averaged, &mut slot.next);
                for (n, v) in slot.next.iter_mut().zip(&slot.averaged) {
                    *n = v - alpha * *n;
                }
            }
        }
        // Partition membership was validated when the instance was built.
        let j = sample_constraint(&problem.partition, i, &mut slot.stream)
            .expect("validated partition");
        problem.components[j].project_in_place(&mut slot.next);
        slot.draw = Some(j);
    };
    if estimates.len() * problem.dim() >= PARALLEL_ROUND_THRESHOLD {
        state.slots.par_iter_mut().enumerate().for_each(step);
    } else {
        state.slots.iter_mut().enumerate().for_each(step);
    }
    for (x, slot) in state.estimates.iter_mut().zip(&mut state.slots) {
        std::mem::swap(x, &mut slot.next);
    }
    state.k += 1;
}

/// One synchronous round of the random projected proximal method.
pub fn proximal_round(
    state: &mut AlgorithmState,
    problem: &ProblemInstance,
    w: &WeightMatrix,
    schedule: &StepSizeSchedule,
) -> Result<()> {
    check_round_inputs(state, problem, w)?;
    round_unchecked(AlgorithmKind::Proximal, state, problem, w, schedule);
    Ok(())
}

/// One synchronous round of the random projected subgradient method.
pub fn subgradient_round(
    state: &mut AlgorithmState,
    problem: &ProblemInstance,
    w: &WeightMatrix,
    schedule: &StepSizeSchedule,
) -> Result<()> {
    check_round_inputs(state, problem, w)?;
    round_unchecked(AlgorithmKind::Subgradient, state, problem, w, schedule);
    Ok(())
}

pub fn round(
    kind: AlgorithmKind,
    state: &mut AlgorithmState,
    problem: &ProblemInstance,
    w: &WeightMatrix,
    schedule: &StepSizeSchedule,
) -> Result<()> {
    match kind {
        AlgorithmKind::Proximal => proximal_round(state, problem, w, schedule),
        AlgorithmKind::Subgradient => subgradient_round(state, problem, w, schedule),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunOptions {
    pub kind: AlgorithmKind,
    pub schedule: StepSizeSchedule,
    pub iterations: u64,
    pub initial_box: (f64, f64),
    pub seed: u64,
    /// Record every `record_every`-th iteration; `k = 0` and the final
    /// iteration are always recorded.
    pub record_every: u64,
    /// Copied into every record.
    pub sampling: u64,
}

impl RunOptions {
    pub fn new(kind: AlgorithmKind, schedule: StepSizeSchedule, iterations: u64, seed: u64) -> Self {
        Self {
            kind,
            schedule,
            iterations,
            initial_box: (-2.0, 2.0),
            seed,
            record_every: 1,
            sampling: 0,
        }
    }

    pub fn records(&self, k: u64) -> bool {
        k == 0 || k == self.iterations || k.is_multiple_of(self.record_every)
    }
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub records: Vec<MetricsRecord>,
    pub final_state: AlgorithmState,
}

/// Runs `options.iterations` rounds from random initial points.
pub fn run(problem: &ProblemInstance, w: &WeightMatrix, options: &RunOptions) -> Result<Trajectory> {
    let (lo, hi) = options.initial_box;
    let state = AlgorithmState::random_start(problem.users(), problem.dim(), lo, hi, options.seed)?;
    run_from(problem, w, options, state)
}

/// Like [`run`] but from a caller-supplied state.
pub fn run_from(
    problem: &ProblemInstance,
    w: &WeightMatrix,
    options: &RunOptions,
    mut state: AlgorithmState,
) -> Result<Trajectory> {
    if options.iterations == 0 {
        return Err(Error::Config("iteration budget must be at least 1".into()));
    }
    if options.record_every == 0 {
        return Err(Error::Config("recording cadence must be at least 1".into()));
    }
    check_round_inputs(&state, problem, w)?;

    let mut records = Vec::new();
    let start = state.k;
    let end = start + options.iterations;
    let record = |state: &AlgorithmState| {
        MetricsRecord::measure(problem, state.estimates(), state.k, options.sampling)
    };
    if options.records(0) {
        records.push(record(&state));
    }
    while state.k < end {
        round_unchecked(options.kind, &mut state, problem, w, &options.schedule);
        if options.records(state.k - start) {
            records.push(record(&state));
        }
    }
    Ok(Trajectory {
        records,
        final_state: state,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::Topology;

    fn scalar_problem() -> ProblemInstance {
        let f = WeightedL1::new(vec![1.0], vec![0.0]).unwrap();
        let ball = Ball::new(vec![0.0], 1.0).unwrap();
        ProblemInstance::from_user_sets(vec![(f, vec![ball])]).unwrap()
    }

    #[test]
    fn single_user_proximal_step() {
        let p = scalar_problem();
        let w = WeightMatrix::identity(1);
        let s = StepSizeSchedule::harmonic(1.0).unwrap();
        let mut st = AlgorithmState::new(vec![vec![3.0]], 0).unwrap();
        proximal_round(&mut st, &p, &w, &s).unwrap();
        assert_eq!(st.estimates()[0], vec![1.0]);
        assert_eq!(st.iteration(), 1);
        assert_eq!(st.averaged(0).unwrap(), &[3.0]);
        assert_eq!(st.residual(0).unwrap(), vec![-2.0]);
    }

    #[test]
    fn single_user_subgradient_step() {
        let p = scalar_problem();
        let w = WeightMatrix::identity(1);
        let s = StepSizeSchedule::harmonic(1.0).unwrap();
        let mut st = AlgorithmState::new(vec![vec![3.0]], 0).unwrap();
        subgradient_round(&mut st, &p, &w, &s).unwrap();
        assert_eq!(st.estimates()[0], vec![1.0]);
    }

    fn zero_objective_problem(m: usize) -> ProblemInstance {
        let users = (0..m)
            .map(|i| {
                let f = WeightedL1::zero(2).unwrap();
                let balls = vec![
                    Ball::new(vec![0.5, 0.0], 2.0).unwrap(),
                    Ball::new(vec![0.0, -0.3 * i as f64], 1.5).unwrap(),
                ];
                (f, balls)
            })
            .collect();
        ProblemInstance::from_user_sets(users).unwrap()
    }

    #[test]
    fn zero_objective_feasible_consensus_is_fixed_point() {
        let m = 6;
        let p = zero_objective_problem(m);
        let t = crate::network::build_ring_of_cliques(m).unwrap();
        let w = crate::network::ring_of_cliques_weights(&t).unwrap();
        let x0 = vec![0.1, -0.2];
        let s = StepSizeSchedule::harmonic(1.0).unwrap();
        for kind in [AlgorithmKind::Proximal, AlgorithmKind::Subgradient] {
            let mut st = AlgorithmState::new(vec![x0.clone(); m], 5).unwrap();
            for _ in 0..20 {
                round(kind, &mut st, &p, &w, &s).unwrap();
                for x in st.estimates() {
                    assert_eq!(x, &x0);
                }
            }
        }
    }

    #[test]
    fn symmetric_pair_stays_identical() {
        let f = WeightedL1::new(vec![0.7, 0.2], vec![0.4, -0.1]).unwrap();
        let ball = Ball::new(vec![1.0, 1.0], 1.2).unwrap();
        let p = ProblemInstance::from_user_sets(vec![
            (f.clone(), vec![ball.clone()]),
            (f, vec![ball]),
        ])
        .unwrap();
        let w = WeightMatrix::from_dense(vec![vec![0.5, 0.5], vec![0.5, 0.5]]).unwrap();
        let s = StepSizeSchedule::harmonic(0.5).unwrap();
        let mut st = AlgorithmState::new(vec![vec![-1.0, 2.0], vec![3.0, 0.5]], 1).unwrap();
        for _ in 0..50 {
            proximal_round(&mut st, &p, &w, &s).unwrap();
            assert_eq!(st.estimates()[0], st.estimates()[1]);
        }
    }

    #[test]
    fn kink_start_reduces_to_projection() {
        let b = vec![0.5, -0.5];
        let f = WeightedL1::new(vec![1.0, 1.0], b.clone()).unwrap();
        let ball = Ball::new(vec![3.0, 0.0], 1.0).unwrap();
        let p = ProblemInstance::from_user_sets(vec![(f, vec![ball.clone()])]).unwrap();
        let mut st = AlgorithmState::new(vec![b.clone()], 0).unwrap();
        subgradient_round(&mut st, &p, &WeightMatrix::identity(1), &StepSizeSchedule::harmonic(1.0).unwrap())
            .unwrap();
        assert_eq!(st.estimates()[0], ball.project(&b).unwrap());
    }

    #[test]
    fn invalid_weights_leave_state_untouched() {
        let p = scalar_problem();
        let s = StepSizeSchedule::harmonic(1.0).unwrap();
        let w = WeightMatrix::from_dense(vec![vec![0.5]]).unwrap();
        let mut st = AlgorithmState::new(vec![vec![3.0]], 0).unwrap();
        assert!(matches!(proximal_round(&mut st, &p, &w, &s), Err(Error::Config(_))));
        assert_eq!(st.estimates()[0], vec![3.0]);
        assert_eq!(st.iteration(), 0);
    }

    #[test]
    fn run_rejects_zero_iterations() {
        let p = scalar_problem();
        let opts = RunOptions::new(
            AlgorithmKind::Proximal,
            StepSizeSchedule::harmonic(1.0).unwrap(),
            0,
            1,
        );
        assert!(run(&p, &WeightMatrix::identity(1), &opts).is_err());
    }

    #[test]
    fn both_algorithms_agree_on_first_scalar_iterate() {
        let p = scalar_problem();
        let w = WeightMatrix::identity(1);
        let s = StepSizeSchedule::harmonic(1.0).unwrap();
        let firsts: Vec<f64> = [AlgorithmKind::Proximal, AlgorithmKind::Subgradient]
            .into_iter()
            .map(|kind| {
                let st = AlgorithmState::new(vec![vec![3.0]], 9).unwrap();
                let opts = RunOptions::new(kind, s, 1, 9);
                run_from(&p, &w, &opts, st).unwrap().final_state.estimates()[0][0]
            })
            .collect();
        assert_eq!(firsts, vec![1.0, 1.0]);
    }

    #[test]
    fn recording_cadence() {
        let p = zero_objective_problem(3);
        let t = Topology::complete(3).unwrap();
        let w = WeightMatrix::from_dense(vec![vec![1.0 / 3.0; 3]; 3]).unwrap();
        assert_eq!(t.users(), w.users());
        let mut opts = RunOptions::new(
            AlgorithmKind::Subgradient,
            StepSizeSchedule::harmonic(1.0).unwrap(),
            25,
            4,
        );
        opts.record_every = 10;
        let traj = run(&p, &w, &opts).unwrap();
        let ks: Vec<u64> = traj.records.iter().map(|r| r.k).collect();
        assert_eq!(ks, vec![0, 10, 20, 25]);

        opts.record_every = 1;
        let full = run(&p, &w, &opts).unwrap();
        assert_eq!(full.records.len(), 26);
        assert_eq!(full.final_state.estimates(), traj.final_state.estimates());
    }

    #[test]
    fn algorithm_kind_parses() {
        assert_eq!("proximal".parse::<AlgorithmKind>().unwrap(), AlgorithmKind::Proximal);
        assert_eq!("subgradient".parse::<AlgorithmKind>().unwrap(), AlgorithmKind::Subgradient);
        assert!("newton".parse::<AlgorithmKind>().is_err());
    }
}
