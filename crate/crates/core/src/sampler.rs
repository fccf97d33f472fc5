//! Reproducible random streams and the per-user constraint draw.
//!
//! # Stream derivation
//!
//! Every random quantity comes from a ChaCha8 stream. The 256-bit key is the
//! master seed expanded with four SplitMix64 outputs, and the 64-bit ChaCha
//! stream number is `(purpose tag << 32) | user`, with `user` the 0-based
//! user index (0 for streams that are not tied to a user). Purpose tags:
//!
//! | tag | purpose                              |
//! |-----|--------------------------------------|
//! | 1   | constraint component draws           |
//! | 2   | initial points                       |
//! | 3   | problem instance generation          |
//! | 4   | test and diagnostic randomness       |
//!
//! Changing how many values one purpose consumes never shifts another
//! purpose's sequence. Samplings of an experiment use master seeds derived
//! with [`derive_seed`].

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// SplitMix64 finalizer.
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed for child `index` of `seed` (e.g. sampling `s` of an experiment).
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    splitmix64(seed ^ splitmix64(index.wrapping_add(0x5EED)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StreamPurpose {
    ConstraintDraw,
    InitialPoint,
    Instance,
    Diagnostic,
}

impl StreamPurpose {
    pub fn tag(self) -> u64 {
        match self {
            StreamPurpose::ConstraintDraw => 1,
            StreamPurpose::InitialPoint => 2,
            StreamPurpose::Instance => 3,
            StreamPurpose::Diagnostic => 4,
        }
    }
}

/// Independent random stream identified by `(seed, user, purpose)`.
#[derive(Debug, Clone)]
pub struct RngStream {
    seed: u64,
    user: u32,
    purpose: StreamPurpose,
    rng: ChaCha8Rng,
}

impl RngStream {
    pub fn new(seed: u64, user: u32, purpose: StreamPurpose) -> Self {
        let mut key = [0u8; 32];
        let mut state = seed;
        for chunk in key.chunks_exact_mut(8) {
            state = splitmix64(state);
            chunk.copy_from_slice(&state.to_le_bytes());
        }
        let mut rng = ChaCha8Rng::from_seed(key);
        rng.set_stream((purpose.tag() << 32) | user as u64);
        Self {
            seed,
            user,
            purpose,
            rng,
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn user(&self) -> u32 {
        self.user
    }

    pub fn purpose(&self) -> StreamPurpose {
        self.purpose
    }

    /// Uniform in `[0, 1)` with 53 random bits.
    pub fn unit(&mut self) -> f64 {
        (self.rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform in `[lo, hi)`.
    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        let v = lo + (hi - lo) * self.unit();
        // rounding can land exactly on hi
        if v >= hi && hi > lo {
            hi.next_down()
        } else {
            v
        }
    }

    /// Uniform integer in `0..n`; `n` must be positive.
    pub fn index(&mut self, n: usize) -> usize {
        self.rng.random_range(0..n as u64) as usize
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }
}

/// Disjoint cover of the global component indices `0..n` by per-user sets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConstraintPartition {
    sets: Vec<Vec<usize>>,
    total: usize,
}

impl ConstraintPartition {
    /// Validates that `sets` are nonempty, disjoint and cover `0..n`. Each
    /// set is kept in ascending order.
    pub fn new(mut sets: Vec<Vec<usize>>) -> Result<Self> {
        let total: usize = sets.iter().map(Vec::len).sum();
        let mut seen = vec![false; total];
        for (i, set) in sets.iter_mut().enumerate() {
            if set.is_empty() {
                return Err(Error::Config(format!("user {} owns no constraint component", i + 1)));
            }
            set.sort_unstable();
            for &j in set.iter() {
                if j >= total || seen[j] {
                    return Err(Error::Config(format!(
                        "component {} is repeated or out of range for a partition of {total}",
                        j + 1
                    )));
                }
                seen[j] = true;
            }
        }
        Ok(Self { sets, total })
    }

    /// Contiguous blocks: user `i` owns the next `sizes[i]` indices.
    pub fn contiguous(sizes: &[usize]) -> Result<Self> {
        let mut next = 0;
        let sets = sizes
            .iter()
            .map(|&s| {
                let set: Vec<usize> = (next..next + s).collect();
                next += s;
                set
            })
            .collect();
        Self::new(sets)
    }

    pub fn users(&self) -> usize {
        self.sets.len()
    }

    pub fn total(&self) -> usize {
        self.total
    }

    pub fn members(&self, i: usize) -> &[usize] {
        &self.sets[i]
    }
}

/// Draws `Omega_i(k)` uniformly from user `i`'s component set and returns
/// the global component index.
pub fn sample_constraint(
    partition: &ConstraintPartition,
    i: usize,
    stream: &mut RngStream,
) -> Result<usize> {
    let set = partition
        .sets
        .get(i)
        .ok_or_else(|| Error::Input(format!("user {} out of range", i + 1)))?;
    if set.is_empty() {
        return Err(Error::Config(format!("user {} owns no constraint component", i + 1)));
    }
    Ok(set[stream.index(set.len())])
}
