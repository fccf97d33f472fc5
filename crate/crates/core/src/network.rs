//! Communication graphs, mixing weights and the connectivity check.
//!
//! Users are 0-indexed in memory. Everything that leaves the process
//! (reports, config files, CSV) uses 1-based user numbers.

use std::collections::{BTreeSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};

/// Tolerance for row and column sums in [`validate_weights`].
pub const STOCHASTIC_TOL: f64 = 1e-12;

/// Smallest weight produced by [`ring_of_cliques_weights`].
pub const RING_OF_CLIQUES_MIN_WEIGHT: f64 = 1.0 / 8.0;

/// Directed communication graph given by in-neighbor sets: `j` is in
/// `neighbors(i)` when user `i` receives from user `j`. Every user is its
/// own neighbor.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Topology {
    neighbors: Vec<Vec<usize>>,
}

impl Topology {
    /// Builds a topology from 0-based neighbor sets. Self loops are added if
    /// missing; duplicates are dropped.
    pub fn new(neighbors: Vec<Vec<usize>>) -> Result<Self> {
        let m = neighbors.len();
        if m == 0 {
            return Err(Error::Config("topology needs at least one user".into()));
        }
        let mut out = Vec::with_capacity(m);
        for (i, set) in neighbors.into_iter().enumerate() {
            let mut s: BTreeSet<usize> = BTreeSet::new();
            for j in set {
                if j >= m {
                    return Err(Error::Config(format!(
                        "user {} lists neighbor {} outside 1..={m}",
                        i + 1,
                        j + 1
                    )));
                }
                s.insert(j);
            }
            s.insert(i);
            out.push(s.into_iter().collect());
        }
        Ok(Self { neighbors: out })
    }

    /// Builds a topology from 1-based neighbor lists, as found in config files.
    pub fn from_one_based(lists: &[Vec<usize>]) -> Result<Self> {
        let mut zero_based = Vec::with_capacity(lists.len());
        for (i, list) in lists.iter().enumerate() {
            let mut row = Vec::with_capacity(list.len());
            for &j in list {
                if j == 0 {
                    return Err(Error::Config(format!(
                        "user {} lists neighbor 0; users are numbered from 1",
                        i + 1
                    )));
                }
                row.push(j - 1);
            }
            zero_based.push(row);
        }
        Self::new(zero_based)
    }

    /// Complete graph on `m` users.
    pub fn complete(m: usize) -> Result<Self> {
        Self::new((0..m).map(|_| (0..m).collect()).collect())
    }

    pub fn users(&self) -> usize {
        self.neighbors.len()
    }

    /// Sorted 0-based in-neighbors of user `i` (including `i`).
    pub fn neighbors(&self, i: usize) -> &[usize] {
        &self.neighbors[i]
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.neighbors[i].binary_search(&j).is_ok()
    }

    pub fn to_one_based(&self) -> Vec<Vec<usize>> {
        self.neighbors
            .iter()
            .map(|row| row.iter().map(|j| j + 1).collect())
            .collect()
    }
}

fn is_hub(i: usize) -> bool {
    i.is_multiple_of(3)
}

/// 0-based members of the overlapping 4-cliques: clique `t` holds users
/// `3t, 3t+1, 3t+2, 3t+3 (mod m)`.
fn ring_cliques(m: usize) -> Vec<[usize; 4]> {
    (0..m / 3)
        .map(|t| [3 * t, 3 * t + 1, 3 * t + 2, (3 * t + 3) % m])
        .collect()
}

fn check_ring_size(m: usize) -> Result<()> {
    if m < 6 || !m.is_multiple_of(3) {
        return Err(Error::Config(format!(
            "ring of cliques needs a user count divisible by 3 and at least 6, got {m}"
        )));
    }
    Ok(())
}

/// Ring of `m / 3` overlapping 4-cliques. In 1-based numbering clique `t`
/// is `{3t-2, 3t-1, 3t, 3t+1 mod m}`; users `1, 4, 7, ...` are hubs shared by
/// two consecutive cliques.
pub fn build_ring_of_cliques(m: usize) -> Result<Topology> {
    check_ring_size(m)?;
    let mut sets = vec![BTreeSet::new(); m];
    for clique in ring_cliques(m) {
        for &i in &clique {
            sets[i].extend(clique.iter().copied());
        }
    }
    Topology::new(sets.into_iter().map(|s| s.into_iter().collect()).collect())
}

/// Dense `m x m` mixing matrix, with the nonzeros of each row cached for
/// the averaging step.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightMatrix {
    m: usize,
    entries: Vec<f64>,
    rows: Vec<Vec<(usize, f64)>>,
}

impl WeightMatrix {
    pub fn from_dense(rows: Vec<Vec<f64>>) -> Result<Self> {
        let m = rows.len();
        if m == 0 {
            return Err(Error::Config("weight matrix must be nonempty".into()));
        }
        let mut entries = Vec::with_capacity(m * m);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != m {
                return Err(Error::Config(format!(
                    "weight matrix row {} has {} entries, expected {m}",
                    i + 1,
                    row.len()
                )));
            }
            if row.iter().any(|w| !w.is_finite()) {
                return Err(Error::Config(format!("weight matrix row {} is not finite", i + 1)));
            }
            entries.extend_from_slice(row);
        }
        Ok(Self::from_entries(m, entries))
    }

    fn from_entries(m: usize, entries: Vec<f64>) -> Self {
        let rows = (0..m)
            .map(|i| {
                (0..m)
                    .filter_map(|j| {
                        let w = entries[i * m + j];
                        (w != 0.0).then_some((j, w))
                    })
                    .collect()
            })
            .collect();
        Self { m, entries, rows }
    }

    /// Weights given as lists parallel to each user's 1-based neighbor list,
    /// the layout used in config files.
    pub fn from_neighbor_lists(topology: &Topology, weights: &[Vec<f64>]) -> Result<Self> {
        let m = topology.users();
        if weights.len() != m {
            return Err(Error::Config(format!(
                "{} weight rows for {m} users",
                weights.len()
            )));
        }
        let mut dense = vec![vec![0.0; m]; m];
        for (i, row) in weights.iter().enumerate() {
            let nbrs = topology.neighbors(i);
            if row.len() != nbrs.len() {
                return Err(Error::Config(format!(
                    "user {} has {} neighbors but {} weights",
                    i + 1,
                    nbrs.len(),
                    row.len()
                )));
            }
            for (&j, &w) in nbrs.iter().zip(row) {
                dense[i][j] = w;
            }
        }
        Self::from_dense(dense)
    }

    /// Row `i` restricted to the neighbor list of `topology`, the inverse of
    /// [`WeightMatrix::from_neighbor_lists`] for matrices that respect the
    /// sparsity pattern.
    pub fn to_neighbor_lists(&self, topology: &Topology) -> Vec<Vec<f64>> {
        (0..self.m)
            .map(|i| topology.neighbors(i).iter().map(|&j| self.get(i, j)).collect())
            .collect()
    }

    pub fn identity(m: usize) -> Self {
        let mut e = vec![0.0; m * m];
        for i in 0..m {
            e[i * m + i] = 1.0;
        }
        Self::from_entries(m, e)
    }

    pub fn users(&self) -> usize {
        self.m
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.m + j]
    }

    /// Nonzero `(column, weight)` pairs of row `i`, ascending by column.
    pub fn row(&self, i: usize) -> &[(usize, f64)] {
        &self.rows[i]
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.m).all(|i| (0..i).all(|j| self.get(i, j) == self.get(j, i)))
    }
}

/// Weights for [`build_ring_of_cliques`]. Inside each clique the two
/// non-hub members exchange `3/8`; every pair involving a hub exchanges
/// `1/8`. Off-diagonal weights add over shared cliques and the diagonal
/// takes the remainder, giving `2/8` for hubs and `3/8` for non-hubs.
pub fn ring_of_cliques_weights(topology: &Topology) -> Result<WeightMatrix> {
    let m = topology.users();
    check_ring_size(m)
        .and_then(|_| build_ring_of_cliques(m))
        .ok()
        .filter(|expected| expected == topology)
        .ok_or_else(|| Error::Config("topology is not a ring of 4-cliques".into()))?;

    let mut w = vec![0.0; m * m];
    for clique in ring_cliques(m) {
        for &i in &clique {
            for &j in &clique {
                if i != j {
                    w[i * m + j] += if is_hub(i) || is_hub(j) { 1.0 / 8.0 } else { 3.0 / 8.0 };
                }
            }
        }
    }
    for i in 0..m {
        let off: f64 = (0..m).filter(|&j| j != i).map(|j| w[i * m + j]).sum();
        w[i * m + i] = 1.0 - off;
    }
    Ok(WeightMatrix::from_entries(m, w))
}

/// One broken condition of a mixing matrix. User numbers are 1-based.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum WeightViolation {
    Negative { row: usize, col: usize, value: f64 },
    OutsideNeighborhood { row: usize, col: usize, value: f64 },
    BelowMinimum { row: usize, col: usize, value: f64, w_min: f64 },
    RowSum { row: usize, sum: f64 },
    ColumnSum { col: usize, sum: f64 },
}

impl fmt::Display for WeightViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Negative { row, col, value } => write!(f, "w[{row},{col}] = {value} is negative"),
            Self::OutsideNeighborhood { row, col, value } => {
                write!(f, "w[{row},{col}] = {value} but {col} is not a neighbor of {row}")
            }
            Self::BelowMinimum { row, col, value, w_min } => {
                write!(f, "w[{row},{col}] = {value} is below the declared minimum {w_min}")
            }
            Self::RowSum { row, sum } => write!(f, "row {row} sums to {sum}"),
            Self::ColumnSum { col, sum } => write!(f, "column {col} sums to {sum}"),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct WeightReport {
    pub violations: Vec<WeightViolation>,
    /// Largest `|row sum - 1|` and `|column sum - 1|` seen.
    pub max_row_error: f64,
    pub max_col_error: f64,
}

impl WeightReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks the sparsity, lower-bound and double-stochasticity conditions.
/// Violations are collected rather than returned as errors.
pub fn validate_weights(w: &WeightMatrix, topology: &Topology, w_min: f64) -> Result<WeightReport> {
    let m = w.users();
    check_dim(topology.users(), m, "weight matrix size")?;
    let mut report = WeightReport::default();
    for i in 0..m {
        for j in 0..m {
            let v = w.get(i, j);
            let (row, col) = (i + 1, j + 1);
            if v < 0.0 {
                report.violations.push(WeightViolation::Negative { row, col, value: v });
            }
            if topology.has_edge(i, j) {
                if v < w_min {
                    report
                        .violations
                        .push(WeightViolation::BelowMinimum { row, col, value: v, w_min });
                }
            } else if v != 0.0 {
                report
                    .violations
                    .push(WeightViolation::OutsideNeighborhood { row, col, value: v });
            }
        }
    }
    for i in 0..m {
        let sum: f64 = (0..m).map(|j| w.get(i, j)).sum();
        report.max_row_error = report.max_row_error.max((sum - 1.0).abs());
        if (sum - 1.0).abs() > STOCHASTIC_TOL {
            report.violations.push(WeightViolation::RowSum { row: i + 1, sum });
        }
    }
    for j in 0..m {
        let sum: f64 = (0..m).map(|i| w.get(i, j)).sum();
        report.max_col_error = report.max_col_error.max((sum - 1.0).abs());
        if (sum - 1.0).abs() > STOCHASTIC_TOL {
            report.violations.push(WeightViolation::ColumnSum { col: j + 1, sum });
        }
    }
    Ok(report)
}

/// True iff for every window start `k` the graph whose edge set is the
/// intersection of `E(k), ..., E(k + q - 1)` is strongly connected.
pub fn check_strong_connectivity(graphs: &[Topology], q: usize) -> Result<bool> {
    if graphs.is_empty() {
        return Err(Error::Input("connectivity check needs at least one graph".into()));
    }
    if q == 0 || q > graphs.len() {
        return Err(Error::Input(format!(
            "window length {q} must lie in 1..={}",
            graphs.len()
        )));
    }
    let m = graphs[0].users();
    if graphs.iter().any(|g| g.users() != m) {
        return Err(Error::Input("graphs in the sequence differ in user count".into()));
    }
    for start in 0..=graphs.len() - q {
        let window = &graphs[start..start + q];
        // in_adj[i] = users that i hears from in every graph of the window.
        let in_adj: Vec<Vec<usize>> = (0..m)
            .map(|i| {
                window[0]
                    .neighbors(i)
                    .iter()
                    .copied()
                    .filter(|&j| j != i && window[1..].iter().all(|g| g.has_edge(i, j)))
                    .collect()
            })
            .collect();
        let mut out_adj = vec![Vec::new(); m];
        for (i, srcs) in in_adj.iter().enumerate() {
            for &j in srcs {
                out_adj[j].push(i);
            }
        }
        if !reaches_all(&in_adj) || !reaches_all(&out_adj) {
            return Ok(false);
        }
    }
    Ok(true)
}

fn reaches_all(adj: &[Vec<usize>]) -> bool {
    let mut seen = vec![false; adj.len()];
    let mut queue = VecDeque::from([0]);
    seen[0] = true;
    let mut count = 1;
    while let Some(u) = queue.pop_front() {
        for &v in &adj[u] {
            if !seen[v] {
                seen[v] = true;
                count += 1;
                queue.push_back(v);
            }
        }
    }
    count == adj.len()
}

/// `v_i = sum_j w_ij x_j` over the nonzeros of row `i`. Assumes a
/// row-stochastic `w`.
pub fn mix(w: &WeightMatrix, estimates: &[Vec<f64>], i: usize) -> Result<Vec<f64>> {
    check_dim(w.users(), estimates.len(), "estimate count")?;
    if i >= w.users() {
        return Err(Error::Input(format!("user index {} out of range", i + 1)));
    }
    let d = estimates[0].len();
    for x in estimates {
        check_dim(d, x.len(), "estimate")?;
    }
    let mut v = vec![0.0; d];
    mix_into(w, estimates, i, &mut v);
    Ok(v)
}

// Accumulated as x_i + sum_j w_ij (x_j - x_i), which equals the plain
// weighted sum for a row-stochastic matrix and returns x_i bit-for-bit when
// every neighbor already agrees with it.
pub(crate) fn mix_into(w: &WeightMatrix, estimates: &[Vec<f64>], i: usize, out: &mut [f64]) {
    let xi = &estimates[i];
    out.copy_from_slice(xi);
    for &(j, wij) in w.row(i) {
        if j == i {
            continue;
        }
        for ((v, x), own) in out.iter_mut().zip(&estimates[j]).zip(xi) {
            *v += wij * (x - own);
        }
    }
}

/// Network section of a config file: 1-based neighbor lists with weights
/// listed in the same order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExplicitNetwork {
    pub neighbors: Vec<Vec<usize>>,
    pub weights: Vec<Vec<f64>>,
}

impl ExplicitNetwork {
    pub fn from_parts(topology: &Topology, w: &WeightMatrix) -> Self {
        Self {
            neighbors: topology.to_one_based(),
            weights: w.to_neighbor_lists(topology),
        }
    }

    pub fn to_parts(&self) -> Result<(Topology, WeightMatrix)> {
        // Keep the listed order: weights are parallel to the lists as written.
        let m = self.neighbors.len();
        if self.weights.len() != m {
            return Err(Error::Config(format!("{} weight rows for {m} users", self.weights.len())));
        }
        let topology = Topology::from_one_based(&self.neighbors)?;
        let mut dense = vec![vec![0.0; m]; m];
        for (i, (nbrs, ws)) in self.neighbors.iter().zip(&self.weights).enumerate() {
            if nbrs.len() != ws.len() {
                return Err(Error::Config(format!(
                    "user {} lists {} neighbors but {} weights",
                    i + 1,
                    nbrs.len(),
                    ws.len()
                )));
            }
            for (&j, &v) in nbrs.iter().zip(ws) {
                dense[i][j - 1] = v;
            }
        }
        Ok((topology, WeightMatrix::from_dense(dense)?))
    }
}
