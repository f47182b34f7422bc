//! Pointwise sparse domination of the Hilbert-type operator and of its
//! commutator with `b(x) = x`, at two resolutions.
//!
//! `cargo run --release --example sparse_domination -- [lambda]`

use wnlab::grid::GridSpec;
use wnlab::harness::standard_functions;
use wnlab::operators::{apply_t_omega, commutator_apply, KernelSpec};
use wnlab::sparse::{build_families, domination_fit, domination_fit_commutator};
use wnlab::weights::{make_symbol, SymbolKind};

fn main() -> wnlab::Result<()> {
    let lambda: f64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(2.0);
    let kernel = KernelSpec::hilbert(1)?;
    println!("{:<22} {:>6} {:>10} {:>5} {:>10} {:>5}", "function", "grid", "c_T", "viol", "c_[b,T]", "viol");
    for f in standard_functions() {
        for k in [10u32, 12] {
            let grid = GridSpec::new_1d(-4.0, 4.0, 1 << k)?;
            let fs = f.sample(&grid)?;
            let b = make_symbol(&SymbolKind::Linear, &grid)?;
            let fams = build_families(&fs, lambda)?;
            let t = apply_t_omega(&fs, &kernel, 1.0)?;
            let c = commutator_apply(&b, |g| apply_t_omega(g, &kernel, 1.0), &fs)?;
            let d = domination_fit(&fs, &t, &fams)?;
            let dc = domination_fit_commutator(&fs, &c, &fams, &b)?;
            println!(
                "{:<22} {:>6} {:>10.4} {:>5} {:>10.4} {:>5}",
                f.label(),
                1 << k,
                d.c_fit,
                d.violations,
                dc.c_fit,
                dc.violations
            );
        }
    }
    Ok(())
}
