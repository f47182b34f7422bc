//! The truncated rough operator T_Ω in 2D for the shipped kernels, and its
//! commutator with b(x) = x_1.
//!
//! `cargo run --release --example rough_transform -- [log2-resolution]`

use wnlab::grid::{lp_norm_unweighted, GridSpec, SampledFunction};
use wnlab::operators::{apply_t_omega, commutator_apply, KernelSpec};
use wnlab::weights::{make_symbol, SymbolKind};

fn main() -> wnlab::Result<()> {
    let k: u32 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(7);
    let grid = GridSpec::new_2d([-2.0; 2], [2.0; 2], 1 << k)?;
    let f = SampledFunction::from_fn(grid, |x| (-(x[0] * x[0] + 2.0 * x[1] * x[1])).exp())?;
    let b = make_symbol(&SymbolKind::Linear, &grid)?;
    let nf = lp_norm_unweighted(&f, 2.0)?;

    println!("{:<12} {:>10} {:>10} {:>12}", "kernel", "|Tf|/|f|", "|[b,T]f|", "odd defect");
    for spec in ["hilbert", "odd-power:3"] {
        let kernel = KernelSpec::parse(spec, 2)?;
        let tf = apply_t_omega(&f, &kernel, 1.0)?;
        let cf = commutator_apply(&b, |g| apply_t_omega(g, &kernel, 1.0), &f)?;
        // f is even, so T f must be odd under x -> -x.
        let defect = (0..grid.len())
            .map(|i| (tf.values()[i] + tf.values()[grid.mirror(i)]).abs())
            .fold(0.0, f64::max);
        println!(
            "{spec:<12} {:>10.4} {:>10.4} {:>12.2e}",
            lp_norm_unweighted(&tf, 2.0)? / nf,
            lp_norm_unweighted(&cf, 2.0)?,
            defect
        );
    }
    Ok(())
}
