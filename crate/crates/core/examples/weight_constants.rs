//! Muckenhoupt constants of power weights |x|^α on [-4, 4].
//!
//! `cargo run --release --example weight_constants -- [log2-resolution]`

use wnlab::grid::{GridSpec, Scope};
use wnlab::harness::Registry;
use wnlab::weights::{make_weight, rhi_check, WeightKind};

fn main() -> wnlab::Result<()> {
    let k: u32 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(10);
    let grid = GridSpec::new_1d(-4.0, 4.0, 1 << k)?;
    let tau = Registry::shipped()?.get("tau")?;
    println!("{:>6} {:>8} {:>8} {:>8} {:>8} {:>8} {:>7}", "alpha", "A_1.5", "A_2", "A_4", "A_1", "A_inf", "RHI");
    for i in -6..=6 {
        let alpha = 0.15 * i as f64;
        let w = make_weight(&WeightKind::Power(alpha), &grid)?;
        let a1 = w.a1(Scope::Full).map_or("-".to_string(), |v| format!("{v:.3}"));
        let rhi = rhi_check(&w, tau, Scope::Full)?;
        println!(
            "{alpha:>6.2} {:>8.3} {:>8.3} {:>8.3} {a1:>8} {:>8.3} {:>7.3}",
            w.ap(1.5, Scope::Full)?,
            w.ap(2.0, Scope::Full)?,
            w.ap(4.0, Scope::Full)?,
            rhi.a_inf,
            rhi.worst_ratio,
        );
    }
    Ok(())
}
