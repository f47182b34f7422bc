//! Rubio de Francia majorant R(h) for a power weight and the A_1 constant
//! of R(h) (M_r w)^{1/p}.

use wnlab::grid::{GridSpec, SampledFunction, Scope};
use wnlab::maximal::{rubio_de_francia, RdfOptions};
use wnlab::weights::{make_weight, Weight, WeightKind};

fn main() -> wnlab::Result<()> {
    let grid = GridSpec::new_1d(-4.0, 4.0, 1 << 10)?;
    let h = SampledFunction::from_fn(grid, |x| if x[0].abs() < 1.0 { 1.0 + x[0] } else { 0.1 })?;
    let (p, r) = (2.0, 2.0);
    println!("{:>6} {:>6} {:>10} {:>10} {:>8}", "alpha", "terms", "|Rh|/|h|", "max step", "A_1");
    for alpha in [-0.6, -0.3, 0.0, 0.3, 0.6] {
        let w = make_weight(&WeightKind::Power(alpha), &grid)?;
        let res = rubio_de_francia(&h, w.function(), p, r, RdfOptions::default())?;
        let a1 = Weight::new(res.a1_candidate())?.a1(Scope::Dyadic)?;
        println!(
            "{alpha:>6.2} {:>6} {:>10.4} {:>10.4} {a1:>8.3}",
            res.terms,
            res.majorant_norm / res.h_norm,
            res.max_step_ratio
        );
    }
    Ok(())
}
