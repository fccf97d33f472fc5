//! The 48-user ring of cliques, its weights, and the checks the
//! convergence theory needs.

use randproj::network::{build_ring_of_cliques, check_strong_connectivity, mix, ring_of_cliques_weights, validate_weights};

fn main() -> randproj::Result<()> {
    let topology = build_ring_of_cliques(48)?;
    let w = ring_of_cliques_weights(&topology)?;

    for i in [1usize, 2] {
        let row: Vec<String> = w.row(i - 1).iter().map(|&(j, v)| format!("{}:{}/8", j + 1, v * 8.0)).collect();
        println!("user {i:>2}: {}", row.join(" "));
    }

    let report = validate_weights(&w, &topology, 1.0 / 8.0)?;
    println!("weights valid: {} (row err {:.1e}, col err {:.1e})", report.is_valid(), report.max_row_error, report.max_col_error);
    println!("symmetric: {}", w.is_symmetric());
    println!("strongly connected: {}", check_strong_connectivity(std::slice::from_ref(&topology), 1)?);

    // one mixing step from a spike at user 1
    let mut x = vec![vec![0.0]; 48];
    x[0][0] = 1.0;
    let v: Vec<f64> = (0..48).map(|i| mix(&w, &x, i).map(|v| v[0])).collect::<randproj::Result<_>>()?;
    println!("v after one mix: user1 {} user2 {} user47 {} user5 {}", v[0], v[1], v[46], v[4]);
    println!("average kept: {}", v.iter().sum::<f64>() / 48.0);
    Ok(())
}
