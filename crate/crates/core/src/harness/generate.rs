//! Random weighted-L1-over-ball-intersection instances with a guaranteed
//! common feasible point.
//!
//! Draw order from stream `(seed, 0, Instance)`:
//! anchor (`d` values), then for each user in turn `a_i` (`d`), `b_i` (`d`),
//! `r_i` (one per component) and the component centers.

use rand_distr::{Distribution, StandardNormal};

use crate::algorithms::ProblemInstance;
use crate::convex_ops::{dist, Ball, WeightedL1};
use crate::error::{Error, Result};
use crate::harness::config::ExperimentConfig;
use crate::sampler::{RngStream, StreamPurpose};

/// Attempts per center before giving up.
pub const CENTER_ATTEMPTS: usize = 100;
/// Offsets of centers from the anchor are drawn from this fraction of the radius.
pub const CENTER_OFFSET_FRACTION: f64 = 0.9;

/// A generated problem plus the hidden point that lies in every component.
/// The anchor is for tests and the oracle's starting point; the distributed
/// algorithms never see it.
#[derive(Debug, Clone)]
pub struct GeneratedInstance {
    pub problem: ProblemInstance,
    pub anchor: Vec<f64>,
}

fn uniform_in_ball(stream: &mut RngStream, dim: usize, radius: f64) -> Vec<f64> {
    loop {
        let dir: Vec<f64> = (0..dim)
            .map(|_| StandardNormal.sample(stream.rng()))
            .collect();
        let n = dir.iter().map(|v| v * v).sum::<f64>().sqrt();
        if n == 0.0 {
            continue;
        }
        let r = radius * stream.unit().powf(1.0 / dim as f64);
        return dir.into_iter().map(|v| v * r / n).collect();
    }
}

pub fn generate_instance(config: &ExperimentConfig, seed: u64) -> Result<GeneratedInstance> {
    config.check()?;
    let d = config.problem.dimension;
    let m = config.problem.users;
    let n = config.problem.components_per_user();
    let g = &config.generation;
    let [a_lo, a_hi] = g.a_range;
    let [b_lo, b_hi] = g.b_range;
    let [r_lo, r_hi] = g.r_range;
    let [c_lo, c_hi] = g.c_range(d);
    let c_max = c_hi.next_down();

    let mut s = RngStream::new(seed, 0, StreamPurpose::Instance);
    let anchor: Vec<f64> = (0..d).map(|_| s.uniform(g.anchor_box[0], g.anchor_box[1])).collect();

    let mut users = Vec::with_capacity(m);
    for i in 0..m {
        // (a_lo, a_hi]
        let a: Vec<f64> = (0..d).map(|_| a_hi - (a_hi - a_lo) * s.unit()).collect();
        let b: Vec<f64> = (0..d).map(|_| s.uniform(b_lo, b_hi)).collect();
        let radii: Vec<f64> = (0..n).map(|_| s.uniform(r_lo, r_hi)).collect();
        let mut balls = Vec::with_capacity(n);
        for (j, &r) in radii.iter().enumerate() {
            let center = (0..CENTER_ATTEMPTS)
                .find_map(|_| {
                    let u = uniform_in_ball(&mut s, d, CENTER_OFFSET_FRACTION * r);
                    let c: Vec<f64> = anchor
                        .iter()
                        .zip(&u)
                        .map(|(x, u)| (x + u).clamp(c_lo, c_max))
                        .collect();
                    (dist(&anchor, &c) <= r).then_some(c)
                })
                .ok_or_else(|| {
                    Error::Config(format!(
                        "could not place component {} of user {} around the anchor within c_range",
                        j + 1,
                        i + 1
                    ))
                })?;
            balls.push(Ball::new(center, r)?);
        }
        users.push((WeightedL1::new(a, b)?, balls));
    }
    Ok(GeneratedInstance {
        problem: ProblemInstance::from_user_sets(users)?,
        anchor,
    })
}
