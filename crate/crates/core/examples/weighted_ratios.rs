//! Two-weight and mixed-constant ratios over power weights for one bump.

use wnlab::grid::{GridSpec, Scope};
use wnlab::harness::{ratio_mixed, ratio_two_weight, RatioContext, RatioKind, TestFunction};
use wnlab::operators::KernelSpec;
use wnlab::weights::{make_weight, WeightKind};

fn main() -> wnlab::Result<()> {
    let grid = GridSpec::new_1d(-4.0, 4.0, 1 << 11)?;
    let f = TestFunction::parse("bump:0:1")?.sample(&grid)?;
    let ctx = RatioContext {
        kernel: KernelSpec::hilbert(1)?,
        eps_cells: 1.0,
        scope: Scope::Full,
    };
    println!("{:>6} {:>10} {:>10} {:>10} {:>10}", "alpha", "tw 0.2", "tw 0.5", "tw 0.8", "mixed-a1");
    for i in -6..=6 {
        let alpha = 0.15 * i as f64;
        let w = make_weight(&WeightKind::Power(alpha), &grid)?;
        let tw: Vec<f64> = [0.2, 0.5, 0.8]
            .iter()
            .map(|&t| ratio_two_weight(&f, &w, 2.0, 2.0, t, &ctx).map(|row| row.ratio))
            .collect::<wnlab::Result<_>>()?;
        let mixed = ratio_mixed(&f, &w, None, 2.0, RatioKind::MixedA1, &ctx)?;
        println!("{alpha:>6.2} {:>10.4} {:>10.4} {:>10.4} {:>10.4}", tw[0], tw[1], tw[2], mixed.ratio);
    }
    Ok(())
}
