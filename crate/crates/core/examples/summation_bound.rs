//! θ Σ_j (1 + N(j)) 2^{-α N(j-1) θ} across θ for a few decay rates.

use wnlab::operators::{summation_bound, summation_j_max};

fn main() -> wnlab::Result<()> {
    let alphas = [0.25, 0.5, 1.0];
    println!("{:>6} {}", "theta", alphas.map(|a| format!("{:>14}", format!("alpha={a}"))).concat());
    for i in [1, 2, 5, 10, 20, 50, 80, 99] {
        let theta = i as f64 / 100.0;
        let mut line = format!("{theta:>6.2}");
        for a in alphas {
            let j = summation_j_max(a, theta)?;
            line += &format!("{:>14.4}", theta * summation_bound(a, theta, j)?);
        }
        println!("{line}");
    }
    Ok(())
}
