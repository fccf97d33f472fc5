use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::algorithms::AlgorithmKind;
use crate::convex_ops::StepSizeSchedule;
use crate::error::{Error, Result};
use crate::network::{
    build_ring_of_cliques, ring_of_cliques_weights, ExplicitNetwork, Topology, WeightMatrix,
    RING_OF_CLIQUES_MIN_WEIGHT,
};

/// Full description of an experiment, read from a TOML document.
///
/// ```toml
/// [problem]
/// dimension = 100
/// users = 48
///
/// [algorithm]
/// kind = "proximal"
/// step_base = 1.0e-3
/// iterations = 1000
///
/// [experiment]
/// samplings = 100
/// seed = 7
///
/// [network]
/// kind = "ring_of_cliques"
/// ```
///
/// See `docs/config.md` for every field and its default.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub problem: ProblemSection,
    pub algorithm: AlgorithmSection,
    pub experiment: ExperimentSection,
    pub network: NetworkSpec,
    #[serde(default)]
    pub generation: GenerationSection,
    #[serde(default)]
    pub output: OutputSection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemSection {
    pub dimension: usize,
    pub users: usize,
    /// Constraint components per user; defaults to `dimension`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub components_per_user: Option<usize>,
}

impl ProblemSection {
    pub fn components_per_user(&self) -> usize {
        self.components_per_user.unwrap_or(self.dimension)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgorithmSection {
    pub kind: AlgorithmKind,
    pub step_base: f64,
    #[serde(default = "default_exponent")]
    pub step_exponent: f64,
    pub iterations: u64,
    #[serde(default = "default_record_every")]
    pub record_every: u64,
}

impl AlgorithmSection {
    pub fn schedule(&self) -> Result<StepSizeSchedule> {
        StepSizeSchedule::new(self.step_base, self.step_exponent)
    }
}

fn default_exponent() -> f64 {
    1.0
}

fn default_record_every() -> u64 {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSection {
    pub samplings: u64,
    pub seed: u64,
    /// Keep one instance for all samplings and re-draw only initial points.
    #[serde(default = "default_true")]
    pub reuse_instance: bool,
}

fn default_true() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum NetworkSpec {
    RingOfCliques {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        w_min: Option<f64>,
    },
    Explicit {
        neighbors: Vec<Vec<usize>>,
        weights: Vec<Vec<f64>>,
        w_min: f64,
    },
}

impl NetworkSpec {
    pub fn ring_of_cliques() -> Self {
        NetworkSpec::RingOfCliques { w_min: None }
    }

    pub fn explicit(topology: &Topology, w: &WeightMatrix, w_min: f64) -> Self {
        let e = ExplicitNetwork::from_parts(topology, w);
        NetworkSpec::Explicit {
            neighbors: e.neighbors,
            weights: e.weights,
            w_min,
        }
    }

    /// Topology, weights and declared minimum weight. Does not validate the
    /// weights; see [`crate::harness::validate_config`].
    pub fn build(&self, users: usize) -> Result<(Topology, WeightMatrix, f64)> {
        match self {
            NetworkSpec::RingOfCliques { w_min } => {
                let t = build_ring_of_cliques(users)?;
                let w = ring_of_cliques_weights(&t)?;
                Ok((t, w, w_min.unwrap_or(RING_OF_CLIQUES_MIN_WEIGHT)))
            }
            NetworkSpec::Explicit {
                neighbors,
                weights,
                w_min,
            } => {
                let (t, w) = ExplicitNetwork {
                    neighbors: neighbors.clone(),
                    weights: weights.clone(),
                }
                .to_parts()?;
                if t.users() != users {
                    return Err(Error::Config(format!(
                        "network lists {} users, problem has {users}",
                        t.users()
                    )));
                }
                Ok((t, w, *w_min))
            }
        }
    }
}

/// Ranges for random instance data. `a` is drawn from `(lo, hi]`, every
/// other range is `[lo, hi)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GenerationSection {
    #[serde(default = "default_a_range")]
    pub a_range: [f64; 2],
    #[serde(default = "default_b_range")]
    pub b_range: [f64; 2],
    #[serde(default = "default_r_range")]
    pub r_range: [f64; 2],
    /// Defaults to `[-sqrt(3d/4), sqrt(3d/4))`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c_range: Option<[f64; 2]>,
    #[serde(default = "default_anchor_box")]
    pub anchor_box: [f64; 2],
    #[serde(default = "default_initial_box")]
    pub initial_box: [f64; 2],
}

fn default_a_range() -> [f64; 2] {
    [0.0, 1.0]
}
fn default_b_range() -> [f64; 2] {
    [0.0, 1.0]
}
fn default_r_range() -> [f64; 2] {
    [3.0, 4.0]
}
fn default_anchor_box() -> [f64; 2] {
    [-1.0, 1.0]
}
fn default_initial_box() -> [f64; 2] {
    [-2.0, 2.0]
}

impl Default for GenerationSection {
    fn default() -> Self {
        Self {
            a_range: default_a_range(),
            b_range: default_b_range(),
            r_range: default_r_range(),
            c_range: None,
            anchor_box: default_anchor_box(),
            initial_box: default_initial_box(),
        }
    }
}

impl GenerationSection {
    pub fn c_range(&self, dim: usize) -> [f64; 2] {
        self.c_range.unwrap_or_else(|| {
            let h = (0.75 * dim as f64).sqrt();
            [-h, h]
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    #[serde(default = "default_out_dir")]
    pub dir: PathBuf,
}

fn default_out_dir() -> PathBuf {
    PathBuf::from("out")
}

impl Default for OutputSection {
    fn default() -> Self {
        Self {
            dir: default_out_dir(),
        }
    }
}

impl ExperimentConfig {
    /// Full-scale defaults: ring of cliques, harmonic steps, default ranges.
    pub fn new(
        dimension: usize,
        users: usize,
        kind: AlgorithmKind,
        step_base: f64,
        iterations: u64,
        samplings: u64,
        seed: u64,
    ) -> Self {
        Self {
            problem: ProblemSection {
                dimension,
                users,
                components_per_user: None,
            },
            algorithm: AlgorithmSection {
                kind,
                step_base,
                step_exponent: 1.0,
                iterations,
                record_every: 1,
            },
            experiment: ExperimentSection {
                samplings,
                seed,
                reuse_instance: true,
            },
            network: NetworkSpec::ring_of_cliques(),
            generation: GenerationSection::default(),
            output: OutputSection::default(),
        }
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| Error::Parse {
            path: PathBuf::from("<string>"),
            message: e.to_string(),
        })?;
        cfg.check()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml_str(&text).map_err(|e| match e {
            Error::Parse { message, .. } => Error::Parse {
                path: path.to_path_buf(),
                message,
            },
            other => other,
        })
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(format!("cannot serialize config: {e}")))
    }

    /// Structural checks on ranges and sizes. Network weights are checked
    /// separately by [`crate::harness::validate_config`].
    pub fn check(&self) -> Result<()> {
        let p = &self.problem;
        if p.dimension == 0 {
            return Err(Error::Config("dimension must be at least 1".into()));
        }
        if p.users == 0 {
            return Err(Error::Config("users must be at least 1".into()));
        }
        if p.components_per_user() == 0 {
            return Err(Error::Config("components_per_user must be at least 1".into()));
        }
        if matches!(self.network, NetworkSpec::RingOfCliques { .. }) && (!p.users.is_multiple_of(3) || p.users < 6) {
            return Err(Error::Config(format!(
                "ring of cliques needs a user count divisible by 3 and at least 6, got {}",
                p.users
            )));
        }
        self.algorithm.schedule()?;
        if self.algorithm.iterations == 0 {
            return Err(Error::Config("iterations must be at least 1".into()));
        }
        if self.algorithm.record_every == 0 {
            return Err(Error::Config("record_every must be at least 1".into()));
        }
        if self.experiment.samplings == 0 {
            return Err(Error::Config("samplings must be at least 1".into()));
        }
        let g = &self.generation;
        check_range("a_range", g.a_range)?;
        if g.a_range[0] < 0.0 {
            return Err(Error::Config("a_range must be nonnegative".into()));
        }
        check_range("b_range", g.b_range)?;
        check_range("r_range", g.r_range)?;
        if g.r_range[0] <= 0.0 {
            return Err(Error::Config("r_range must be positive".into()));
        }
        check_range("c_range", g.c_range(p.dimension))?;
        check_range("anchor_box", g.anchor_box)?;
        check_range("initial_box", g.initial_box)?;
        Ok(())
    }
}

fn check_range(name: &str, [lo, hi]: [f64; 2]) -> Result<()> {
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(Error::Config(format!("{name} = [{lo}, {hi}] is not a valid interval")));
    }
    Ok(())
}
