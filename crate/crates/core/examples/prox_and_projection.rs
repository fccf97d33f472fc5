//! Closed-form building blocks: weighted-L1 prox and subgradient, ball
//! projection, and the firm nonexpansivity check.
//!
//! ```bash
//! cargo run --example prox_and_projection
//! ```

use randproj::convex_ops::{firm_nonexpansive_slack, prox_characterization_holds};
use randproj::{Ball, WeightedL1};

fn main() -> randproj::Result<()> {
    let f = WeightedL1::new(vec![1.0, 0.5, 2.0], vec![0.0, 1.0, -1.0])?;
    let x = [3.0, 1.2, 0.5];
    let alpha = 1.0;

    let p = f.prox(alpha, &x)?;
    println!("f(x)            = {}", f.eval(&x)?);
    println!("subgradient     = {:?}", f.subgradient(&x)?);
    println!("prox_(a f)(x)   = {p:?}");

    let trials: Vec<Vec<f64>> = (-4..=4).map(|t| vec![t as f64, 0.5 * t as f64, -1.0]).collect();
    println!("prox optimality = {}", prox_characterization_holds(&f, alpha, &x, &p, &trials)?);

    let ball = Ball::new(vec![1.0, 1.0, 0.0], 2.0)?;
    let q = ball.project(&x)?;
    println!("P_B(x)          = {q:?} (inside: {})", ball.contains(&q));
    println!("dist(x, B)      = {}", ball.distance(&x));

    let y = [-2.0, 4.0, 1.0];
    println!("firm slack prox = {:.3e}", firm_nonexpansive_slack(|z| f.prox(alpha, z), &x, &y)?);
    println!("firm slack P_B  = {:.3e}", firm_nonexpansive_slack(|z| ball.project(z), &x, &y)?);
    Ok(())
}
