//! Closed-form convex-analysis primitives.
//!
//! Everything here is a pure function of its arguments. The objectives are
//! separable weighted L1 norms `f(x) = sum_j a_j |x_j - b_j|` and the
//! constraint components are closed Euclidean balls, so the proximity
//! operator, a subgradient and the metric projection are all available in
//! closed form.

use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};

/// Absolute slack used by [`prox_characterization_holds`].
pub const PROX_CHARACTERIZATION_TOL: f64 = 1e-9;

pub fn dot(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

pub fn norm(x: &[f64]) -> f64 {
    dot(x, x).sqrt()
}

pub fn dist(x: &[f64], y: &[f64]) -> f64 {
    x.iter()
        .zip(y)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt()
}

/// `f(x) = sum_j a_j |x_j - b_j|` with nonnegative weights `a`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightedL1 {
    weights: Vec<f64>,
    anchors: Vec<f64>,
}

impl WeightedL1 {
    pub fn new(weights: Vec<f64>, anchors: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::Input("weighted L1 needs dimension >= 1".into()));
        }
        check_dim(weights.len(), anchors.len(), "weighted L1 anchors")?;
        if let Some(j) = weights.iter().position(|a| !(*a >= 0.0) || !a.is_finite()) {
            return Err(Error::Input(format!(
                "weight a[{j}] = {} must be finite and nonnegative",
                weights[j]
            )));
        }
        if anchors.iter().any(|b| !b.is_finite()) {
            return Err(Error::Input("anchors must be finite".into()));
        }
        Ok(Self { weights, anchors })
    }

    /// The zero function on `R^d`.
    pub fn zero(dim: usize) -> Result<Self> {
        Self::new(vec![0.0; dim], vec![0.0; dim])
    }

    pub fn dim(&self) -> usize {
        self.weights.len()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn anchors(&self) -> &[f64] {
        &self.anchors
    }

    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        check_dim(self.dim(), x.len(), "weighted L1 argument")?;
        Ok(self.eval_unchecked(x))
    }

    pub(crate) fn eval_unchecked(&self, x: &[f64]) -> f64 {
        self.weights
            .iter()
            .zip(&self.anchors)
            .zip(x)
            .map(|((a, b), x)| a * (x - b).abs())
            .sum()
    }

    /// Coordinate-wise `a_j * sign(x_j - b_j)` with `sign(0) = 0`, the
    /// minimal-norm element of the subdifferential.
    pub fn subgradient(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_dim(self.dim(), x.len(), "weighted L1 argument")?;
        let mut g = vec![0.0; x.len()];
        self.subgradient_into(x, &mut g);
        Ok(g)
    }

    pub(crate) fn subgradient_into(&self, x: &[f64], out: &mut [f64]) {
        for (((g, a), b), x) in out.iter_mut().zip(&self.weights).zip(&self.anchors).zip(x) {
            *g = a * sign(x - b);
        }
    }

    /// Proximity operator of `alpha * f`, the unique minimizer of
    /// `alpha f(y) + |x - y|^2 / 2`. Separable, so each coordinate is a
    /// soft-thresholding around its anchor.
    pub fn prox(&self, alpha: f64, x: &[f64]) -> Result<Vec<f64>> {
        if !(alpha > 0.0) || !alpha.is_finite() {
            return Err(Error::Input(format!("prox step must be positive, got {alpha}")));
        }
        check_dim(self.dim(), x.len(), "weighted L1 argument")?;
        let mut p = vec![0.0; x.len()];
        self.prox_into(alpha, x, &mut p);
        Ok(p)
    }

    pub(crate) fn prox_into(&self, alpha: f64, x: &[f64], out: &mut [f64]) {
        for (((p, a), b), x) in out.iter_mut().zip(&self.weights).zip(&self.anchors).zip(x) {
            let t = x - b;
            let lambda = alpha * a;
            // Written as a shift of x rather than b + soft(t) so that a zero
            // threshold returns x bit-for-bit.
            *p = if t.abs() <= lambda { *b } else { x - t.signum() * lambda };
        }
    }

    /// Certified bound on every subgradient norm (`|a|_2`).
    pub fn subgradient_bound(&self) -> f64 {
        norm(&self.weights)
    }
}

fn sign(t: f64) -> f64 {
    if t > 0.0 {
        1.0
    } else if t < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// Closed Euclidean ball `{x : |x - center| <= radius}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Ball {
    center: Vec<f64>,
    radius: f64,
}

impl Ball {
    pub fn new(center: Vec<f64>, radius: f64) -> Result<Self> {
        if center.is_empty() {
            return Err(Error::Input("ball center needs dimension >= 1".into()));
        }
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(Error::Input(format!("ball radius must be positive, got {radius}")));
        }
        if center.iter().any(|c| !c.is_finite()) {
            return Err(Error::Input("ball center must be finite".into()));
        }
        Ok(Self { center, radius })
    }

    pub fn dim(&self) -> usize {
        self.center.len()
    }

    pub fn center(&self) -> &[f64] {
        &self.center
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    /// Membership with no tolerance.
    pub fn contains(&self, x: &[f64]) -> bool {
        dist(x, &self.center) <= self.radius
    }

    pub fn distance(&self, x: &[f64]) -> f64 {
        (dist(x, &self.center) - self.radius).max(0.0)
    }

    pub fn project(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_dim(self.dim(), x.len(), "ball projection argument")?;
        let mut p = x.to_vec();
        self.project_in_place(&mut p);
        Ok(p)
    }

    /// Radial projection. The result is guaranteed to satisfy
    /// [`Ball::contains`] in floating point: if rounding lands the radial
    /// point a hair outside, the scale is nudged down one ulp at a time.
    pub(crate) fn project_in_place(&self, x: &mut [f64]) {
        let n = dist(x, &self.center);
        if n <= self.radius {
            return;
        }
        let orig = x.to_vec();
        let mut scale = self.radius / n;
        loop {
            for ((xi, oi), ci) in x.iter_mut().zip(&orig).zip(&self.center) {
                *xi = ci + scale * (oi - ci);
            }
            if dist(x, &self.center) <= self.radius {
                return;
            }
            scale = scale.next_down();
        }
    }
}

/// Diminishing step sizes `alpha_k = base / (k + 1)^exponent`.
///
/// With `exponent` in `(1/2, 1]` the sequence is not summable but square
/// summable, which is what the convergence theory of both algorithms needs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepSizeSchedule {
    base: f64,
    exponent: f64,
}

impl StepSizeSchedule {
    pub fn new(base: f64, exponent: f64) -> Result<Self> {
        if !(base > 0.0) || !base.is_finite() {
            return Err(Error::Config(format!("step base must be positive, got {base}")));
        }
        if !(exponent > 0.5 && exponent <= 1.0) {
            return Err(Error::Config(format!(
                "step exponent must lie in (1/2, 1], got {exponent}"
            )));
        }
        Ok(Self { base, exponent })
    }

    /// `base / (k + 1)`.
    pub fn harmonic(base: f64) -> Result<Self> {
        Self::new(base, 1.0)
    }

    pub fn base(&self) -> f64 {
        self.base
    }

    pub fn exponent(&self) -> f64 {
        self.exponent
    }

    pub fn at(&self, k: u64) -> f64 {
        let n = (k + 1) as f64;
        if self.exponent == 1.0 {
            self.base / n
        } else {
            self.base / n.powf(self.exponent)
        }
    }
}

/// Checks the variational characterization of `p = prox_{alpha f}(x)`:
/// `<y - p, x - p> + alpha f(p) <= alpha f(y)` at every trial point, within
/// [`PROX_CHARACTERIZATION_TOL`].
pub fn prox_characterization_holds(
    f: &WeightedL1,
    alpha: f64,
    x: &[f64],
    p: &[f64],
    trial_points: &[Vec<f64>],
) -> Result<bool> {
    if trial_points.is_empty() {
        return Err(Error::Input("prox characterization needs trial points".into()));
    }
    if !(alpha > 0.0) {
        return Err(Error::Input(format!("prox step must be positive, got {alpha}")));
    }
    check_dim(f.dim(), x.len(), "x")?;
    check_dim(f.dim(), p.len(), "p")?;
    let x_minus_p: Vec<f64> = x.iter().zip(p).map(|(a, b)| a - b).collect();
    let fp = alpha * f.eval_unchecked(p);
    for y in trial_points {
        check_dim(f.dim(), y.len(), "trial point")?;
        let y_minus_p: Vec<f64> = y.iter().zip(p).map(|(a, b)| a - b).collect();
        let lhs = dot(&y_minus_p, &x_minus_p) + fp;
        if lhs > alpha * f.eval_unchecked(y) + PROX_CHARACTERIZATION_TOL {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `|x - y|^2 - |Tx - Ty|^2 - |(x - Tx) - (y - Ty)|^2`, nonnegative iff the
/// firm nonexpansivity inequality holds for this pair.
pub fn firm_nonexpansive_slack<T>(op: T, x: &[f64], y: &[f64]) -> Result<f64>
where
    T: Fn(&[f64]) -> Result<Vec<f64>>,
{
    check_dim(x.len(), y.len(), "firm nonexpansivity pair")?;
    let tx = op(x)?;
    let ty = op(y)?;
    let mut lhs_move = 0.0;
    let mut lhs_resid = 0.0;
    let mut rhs = 0.0;
    for j in 0..x.len() {
        let d = tx[j] - ty[j];
        let r = (x[j] - tx[j]) - (y[j] - ty[j]);
        let e = x[j] - y[j];
        lhs_move += d * d;
        lhs_resid += r * r;
        rhs += e * e;
    }
    Ok(rhs - lhs_move - lhs_resid)
}
