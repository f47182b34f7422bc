//! Littlewood–Paley pieces of the Hilbert kernel: reconstruction error and
//! the decay of the piece norms.
//!
//! `cargo run --release --example decomposition -- [log2-resolution]`

use wnlab::grid::{GridSpec, SampledFunction};
use wnlab::operators::{
    commutator_decay_scan, piece_decay_scan, reconstruction_errors, DecompositionPlan, KernelSpec,
};
use wnlab::weights::{make_symbol, SymbolKind};

fn main() -> wnlab::Result<()> {
    let k: u32 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(12);
    let grid = GridSpec::new_1d(-4.0, 4.0, 1 << k)?;
    let kernel = KernelSpec::hilbert(1)?;
    let plan = DecompositionPlan::new(6)?;
    let bump = SampledFunction::from_fn(grid, |x| (-(x[0] - 0.25).powi(2) * 4.0).exp())?;

    println!("J  relative L2 error of the partial reconstruction");
    for (j, err) in reconstruction_errors(&bump, &kernel, &plan)? {
        println!("{j}  {err:.3e}");
    }

    let scan = piece_decay_scan(&kernel, &plan, 2.0, &grid, 7)?;
    println!("\nj  N(j)  L2 norm estimate");
    for r in &scan.rows {
        println!("{}  {}  {:.6e}", r.j, r.n_j, r.norm);
    }
    println!("fitted alpha: {:?}", scan.alpha);

    let b = make_symbol(&SymbolKind::Linear, &grid)?;
    let comm = commutator_decay_scan(&kernel, &plan, &b, 2.0, &grid, 7)?;
    println!("\ncommutator pieces");
    for r in &comm.rows {
        println!("{}  {}  {:.6e}", r.j, r.n_j, r.norm);
    }
    println!("fitted alpha: {:?}", comm.alpha);
    Ok(())
}
