//! Maximal operators on a step function, and the pointwise chain
//! M f <= M_{L log L} f <= r' M_r f.

use wnlab::grid::{GridSpec, Scope};
use wnlab::harness::TestFunction;
use wnlab::maximal::{hl_maximal, iterated_maximal, orlicz_maximal, power_maximal, YoungFunction};

fn main() -> wnlab::Result<()> {
    let grid = GridSpec::new_1d(-4.0, 4.0, 1 << 10)?;
    let f = TestFunction::parse("step:-1:1:1,3,2")?.sample(&grid)?;
    let scope = Scope::Full;
    let m = hl_maximal(&f, scope);
    let m2 = iterated_maximal(&f, 2, scope)?;
    let ml = orlicz_maximal(&f, &YoungFunction::llogl1(), scope)?;
    let mr = power_maximal(&f, 2.0, scope)?;

    println!("{:>7} {:>8} {:>8} {:>8} {:>8} {:>8}", "x", "f", "M", "M^2", "M_LlogL", "M_2");
    for i in (0..grid.len()).step_by(64) {
        let x = grid.cell_center(i)[0];
        let v = |g: &wnlab::grid::SampledFunction| g.values()[i];
        println!(
            "{x:>7.3} {:>8.4} {:>8.4} {:>8.4} {:>8.4} {:>8.4}",
            v(&f), v(&m), v(&m2), v(&ml), v(&mr)
        );
    }

    let worst = |a: &[f64], b: &[f64], c: f64| a.iter().zip(b).map(|(x, y)| x / (c * y)).fold(0.0, f64::max);
    println!("\nmax M / M_LlogL     = {:.6}", worst(m.values(), ml.values(), 1.0));
    println!("max M_LlogL / 2 M_2 = {:.6}", worst(ml.values(), mr.values(), 2.0));
    Ok(())
}
