//! Maximal operators over dyadic cubes: Hardy–Littlewood, power `M_r`,
//! iterated `M^k`, Orlicz `M_{Ψ(L)}`, together with Luxemburg norms, the
//! complementary Young function and the Rubio de Francia iteration.
//!
//! Every supremum runs over the cubes of a [`Scope`]. Within one lattice the
//! evaluation is a bottom-up sweep of cube sums followed by a per-cell maximum
//! over the containing cubes, so it costs `O(N log N)`.

mod rdf;
mod young;

pub use rdf::{rubio_de_francia, RdfOptions, RdfResult};
pub use young::{log_plus, YoungFunction};

use crate::error::{Error, Result};
use crate::grid::{Cube, DyadicLattice, SampledFunction, Scope};
use rayon::prelude::*;

/// Which maximal operator to apply.
#[derive(Debug, Clone)]
pub enum MaximalKind {
    HardyLittlewood,
    Power(f64),
    Iterated(u32),
    Orlicz(YoungFunction),
}

/// A maximal operator together with the cubes it ranges over.
#[derive(Debug, Clone)]
pub struct MaximalOperatorSpec {
    pub kind: MaximalKind,
    pub scope: Scope,
}

impl MaximalOperatorSpec {
    pub fn new(kind: MaximalKind, scope: Scope) -> Result<Self> {
        match &kind {
            MaximalKind::Power(r) if !(*r > 0.0) => {
                return Err(Error::param("r", *r, "power maximal needs r > 0"))
            }
            MaximalKind::Iterated(0) => {
                return Err(Error::param("k", 0.0, "iterated maximal needs k >= 1"))
            }
            _ => {}
        }
        Ok(Self { kind, scope })
    }

    pub fn apply(&self, f: &SampledFunction) -> Result<SampledFunction> {
        match &self.kind {
            MaximalKind::HardyLittlewood => Ok(hl_maximal(f, self.scope)),
            MaximalKind::Power(r) => power_maximal(f, *r, self.scope),
            MaximalKind::Iterated(k) => iterated_maximal(f, *k, self.scope),
            MaximalKind::Orlicz(psi) => orlicz_maximal(f, psi, self.scope),
        }
    }
}

fn max_into(acc: &mut [f64], vals: Vec<f64>) {
    for (a, v) in acc.iter_mut().zip(vals) {
        *a = a.max(v);
    }
}

/// `Mf(x) = sup_{Q ∋ x} ⟨|f|⟩_Q` over the cubes of `scope`.
pub fn hl_maximal(f: &SampledFunction, scope: Scope) -> SampledFunction {
    let abs: Vec<f64> = f.values().iter().map(|v| v.abs()).collect();
    let mut out = vec![0.0; abs.len()];
    for lattice in scope.lattices(f.grid()) {
        let means = lattice.level_means(&abs);
        max_into(&mut out, lattice.sup_over_containing(&means));
    }
    SampledFunction::from_raw(*f.grid(), out)
}

/// `M_r f = (M |f|^r)^{1/r}`.
pub fn power_maximal(f: &SampledFunction, r: f64, scope: Scope) -> Result<SampledFunction> {
    if !(r > 0.0) || !r.is_finite() {
        return Err(Error::param("r", r, "power maximal needs 0 < r < inf"));
    }
    if r == 1.0 {
        return Ok(hl_maximal(f, scope));
    }
    let powered = f.map(|v| v.abs().powf(r));
    Ok(hl_maximal(&powered, scope).map(|v| v.powf(1.0 / r)))
}

/// `M^k f`, the `k`-fold composition of `M`.
pub fn iterated_maximal(f: &SampledFunction, k: u32, scope: Scope) -> Result<SampledFunction> {
    if k < 1 {
        return Err(Error::param("k", k as f64, "iterated maximal needs k >= 1"));
    }
    let mut g = hl_maximal(f, scope);
    for _ in 1..k {
        g = hl_maximal(&g, scope);
    }
    Ok(g)
}

/// Luxemburg norm of the magnitudes `vals` with respect to the normalized
/// counting measure.
pub(crate) fn luxemburg_of_values(vals: &[f64], psi: &YoungFunction) -> Result<f64> {
    let m = vals.iter().fold(0.0f64, |a, &v| a.max(v.abs()));
    if m == 0.0 {
        return Ok(0.0);
    }
    let n = vals.len() as f64;
    if psi.is_identity() {
        return Ok(vals.iter().map(|v| v.abs()).sum::<f64>() / n);
    }
    let avg =|lambda: f64| vals.iter().map(|&v| psi.eval(v.abs() / lambda)).sum::<f64>() / n;

    let mut hi = m;
    let mut expansions = 0;
    while !(avg(hi) <= 1.0) {
        hi *= 2.0;
        expansions += 1;
        if expansions > 1100 || !hi.is_finite() {
            return Err(Error::Numeric(format!(
                "Luxemburg bracket for {} does not close from above",
                psi.label()
            )));
        }
    }
    let mut lo = match psi.inverse(1e12) {
        Some(inv) if inv > 0.0 && m / inv < hi => m / inv,
        _ => hi * 0.5,
    };
    let mut contractions = 0;
    while avg(lo) <= 1.0 {
        hi = lo;
        lo *= 0.5;
        contractions += 1;
        if contractions > 1100 || lo == 0.0 {
            return Err(Error::Numeric(format!(
                "Luxemburg bracket for {} does not close from below",
                psi.label()
            )));
        }
    }
    // avg(lo) > 1 >= avg(hi)
    for _ in 0..300 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if avg(mid) <= 1.0 {
            hi = mid;
        } else {
            lo = mid;
        }
        if hi - lo <= 1e-15 * hi {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// `‖f‖_{Ψ(L),Q} = inf{λ > 0 : ⟨Ψ(|f|/λ)⟩_Q <= 1}` by bracketing and bisection.
pub fn luxemburg_norm(f: &SampledFunction, cube: &Cube, psi: &YoungFunction) -> Result<f64> {
    cube.check_within(f.grid())?;
    let vals: Vec<f64> = cube.cells(f.grid()).map(|c| f.values()[c]).collect();
    luxemburg_of_values(&vals, psi)
}

/// Luxemburg norms of `f` over every cube of `lattice`, level by level.
pub(crate) fn lattice_luxemburg(
    f: &SampledFunction,
    lattice: &DyadicLattice,
    psi: &YoungFunction,
) -> Result<Vec<Vec<f64>>> {
    let grid = f.grid();
    lattice
        .levels()
        .map(|k| {
            (0..lattice.cubes_at(k))
                .into_par_iter()
                .map(|i| {
                    let q = lattice.cube(k, i);
                    let vals: Vec<f64> = q.cells(grid).map(|c| f.values()[c]).collect();
                    luxemburg_of_values(&vals, psi)
                })
                .collect::<Result<Vec<f64>>>()
        })
        .collect()
}

/// `M_{Ψ(L)} f(x) = sup_{Q ∋ x} ‖f‖_{Ψ(L),Q}`.
pub fn orlicz_maximal(
    f: &SampledFunction,
    psi: &YoungFunction,
    scope: Scope,
) -> Result<SampledFunction> {
    let mut out = vec![0.0; f.grid().len()];
    for lattice in scope.lattices(f.grid()) {
        let norms = lattice_luxemburg(f, &lattice, psi)?;
        max_into(&mut out, lattice.sup_over_containing(&norms));
    }
    Ok(SampledFunction::from_raw(*f.grid(), out))
}

/// `Ψ̄(s) = sup_{t > 0} (s t - Ψ(t))`, maximized by golden-section search in
/// `ln t` after locating the peak on a log-spaced bracket `[1e-12, 1e12]`.
pub fn complementary(psi: &YoungFunction, s: f64) -> Result<f64> {
    if !(s >= 0.0) || !s.is_finite() {
        return Err(Error::param("s", s, "complementary function needs s >= 0"));
    }
    if s == 0.0 {
        return Ok(0.0);
    }
    let g = |u: f64| {
        let t = u.exp();
        s * t - psi.eval(t)
    };
    const STEPS: i32 = 96;
    let us: Vec<f64> = (-STEPS..=STEPS)
        .map(|k| (k as f64 / 4.0) * std::f64::consts::LN_10)
        .collect();
    let vals: Vec<f64> = us.iter().map(|&u| g(u)).collect();
    let (imax, vmax) = vals
        .iter()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |(bi, bv), (i, &v)| {
            if v > bv {
                (i, v)
            } else {
                (bi, bv)
            }
        });
    if imax == vals.len() - 1 || !vmax.is_finite() {
        return Err(Error::Numeric(format!(
            "sup_t (s t - {}(t)) is unbounded at s = {s}",
            psi.label()
        )));
    }
    if imax == 0 {
        return Ok(vmax.max(0.0));
    }
    let (mut a, mut b) = (us[imax - 1], us[imax + 1]);
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut gc, mut gd) = (g(c), g(d));
    for _ in 0..200 {
        if (b - a).abs() <= 1e-12 * (1.0 + a.abs().max(b.abs())) {
            break;
        }
        if gc > gd {
            b = d;
            d = c;
            gd = gc;
            c = b - inv_phi * (b - a);
            gc = g(c);
        } else {
            a = c;
            c = d;
            gc = gd;
            d = a + inv_phi * (b - a);
            gd = g(d);
        }
    }
    let best = g(0.5 * (a + b)).max(gc).max(gd).max(vmax);
    Ok(best.max(0.0))
}

/// `Ψ̄` as a Young function evaluated numerically; points where the supremum
/// is unbounded evaluate to `+∞`.
pub fn complementary_function(psi: &YoungFunction) -> YoungFunction {
    let base = psi.clone();
    YoungFunction::custom(format!("complement({})", psi.label()), move |s| {
        complementary(&base, s).unwrap_or(f64::INFINITY)
    })
}

/// Outcome of the generalized Hölder inequality on one cube.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HolderCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

/// `⟨|fg|⟩_Q <= 2 ‖f‖_{Ψ,Q} ‖g‖_{Ψ̄,Q}` with `Ψ̄` evaluated numerically.
pub fn generalized_holder_check(
    f: &SampledFunction,
    g: &SampledFunction,
    cube: &Cube,
    psi: &YoungFunction,
) -> Result<HolderCheck> {
    f.grid().ensure_same(g.grid())?;
    cube.check_within(f.grid())?;
    let fg = f.mul(g)?;
    let lhs = crate::grid::average(&fg.abs(), cube)?;
    let nf = luxemburg_norm(f, cube, psi)?;
    let ng = luxemburg_norm(g, cube, &complementary_function(psi))?;
    let rhs = 2.0 * nf * ng;
    Ok(HolderCheck {
        lhs,
        rhs,
        holds: lhs <= rhs * (1.0 + 1e-8),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{average, enumerate_cubes, GridSpec};
    use approx::assert_relative_eq;

    fn grid8() -> GridSpec {
        GridSpec::unit_1d(8).unwrap()
    }

    #[test]
    fn hl_of_left_cell_indicator() {
        let mut v = vec![0.0; 8];
        v[0] = 1.0;
        let f = SampledFunction::new(grid8(), v).unwrap();
        let m = hl_maximal(&f, Scope::Dyadic);
        assert_eq!(
            m.values(),
            &[1.0, 0.5, 0.25, 0.25, 0.125, 0.125, 0.125, 0.125]
        );
    }

    #[test]
    fn maximal_of_constant_is_constant() {
        let f = SampledFunction::constant(grid8(), 2.5);
        for scope in [Scope::Dyadic, Scope::Full] {
            assert!(hl_maximal(&f, scope).values().iter().all(|&v| (v - 2.5).abs() < 1e-15));
            let m = power_maximal(&f, 3.0, scope).unwrap();
            assert!(m.values().iter().all(|&v| (v - 2.5).abs() < 1e-14));
            let m = iterated_maximal(&f, 3, scope).unwrap();
            assert!(m.values().iter().all(|&v| (v - 2.5).abs() < 1e-15));
        }
    }

    #[test]
    fn parameter_errors() {
        let f = SampledFunction::constant(grid8(), 1.0);
        assert!(power_maximal(&f, 0.0, Scope::Dyadic).is_err());
        assert!(iterated_maximal(&f, 0, Scope::Dyadic).is_err());
        assert!(MaximalOperatorSpec::new(MaximalKind::Power(-1.0), Scope::Dyadic).is_err());
        assert!(MaximalOperatorSpec::new(MaximalKind::Iterated(0), Scope::Dyadic).is_err());
        assert!(complementary(&YoungFunction::identity(), -1.0).is_err());
    }

    #[test]
    fn luxemburg_reduces_to_averages() {
        let g = grid8();
        let f = SampledFunction::new(g, vec![1.0, -3.0, 0.5, 2.0, 0.0, 4.0, 1.5, -0.25]).unwrap();
        for q in enumerate_cubes(&DyadicLattice::unshifted(g), 1) {
            let avg = average(&f.abs(), &q).unwrap();
            let id = luxemburg_norm(&f, &q, &YoungFunction::identity()).unwrap();
            assert_relative_eq!(id, avg, max_relative = 1e-12);
            let l3 = luxemburg_norm(&f, &q, &YoungFunction::power(3.0).unwrap()).unwrap();
            let direct = average(&f.map(|v| v.abs().powi(3)), &q).unwrap().cbrt();
            assert_relative_eq!(l3, direct, max_relative = 1e-12);
        }
    }

    #[test]
    fn luxemburg_of_zero_and_degenerate_psi() {
        let g = grid8();
        let q = DyadicLattice::unshifted(g).cube(3, 0);
        let z = SampledFunction::zeros(g);
        assert_eq!(luxemburg_norm(&z, &q, &YoungFunction::llogl1()).unwrap(), 0.0);
        let f = SampledFunction::constant(g, 1.0);
        let bounded = YoungFunction::custom("bounded", |t: f64| 0.5 * t.min(1.0));
        assert!(matches!(
            luxemburg_norm(&f, &q, &bounded),
            Err(Error::Numeric(_))
        ));
    }

    #[test]
    fn luxemburg_is_homogeneous() {
        let g = grid8();
        let f = SampledFunction::new(g, vec![0.3, 2.0, 0.0, 7.0, 1.0, 1.0, 0.1, 5.0]).unwrap();
        let q = DyadicLattice::unshifted(g).cube(3, 0);
        let psi = YoungFunction::llogl1();
        let base = luxemburg_norm(&f, &q, &psi).unwrap();
        for c in [-3.0, 0.01, 250.0] {
            let scaled = luxemburg_norm(&f.scale(c), &q, &psi).unwrap();
            assert_relative_eq!(scaled, c.abs() * base, max_relative = 1e-8);
        }
    }

    #[test]
    fn orlicz_maximal_identity_and_constant() {
        let g = grid8();
        let f = SampledFunction::new(g, vec![0.3, 2.0, 0.0, 7.0, 1.0, 1.0, 0.1, 5.0]).unwrap();
        let a = orlicz_maximal(&f, &YoungFunction::identity(), Scope::Full).unwrap();
        let b = hl_maximal(&f, Scope::Full);
        for (x, y) in a.values().iter().zip(b.values()) {
            assert_relative_eq!(*x, *y, max_relative = 1e-12);
        }
        let c = SampledFunction::constant(g, 4.0);
        let m = orlicz_maximal(&c, &YoungFunction::llogl1(), Scope::Dyadic).unwrap();
        assert!(m.values().iter().all(|&v| (v - 4.0).abs() < 1e-12));
    }

    #[test]
    fn complementary_closed_forms() {
        let half_sq = YoungFunction::custom("t^2/2", |t| 0.5 * t * t);
        assert_eq!(complementary(&half_sq, 0.0).unwrap(), 0.0);
        assert_relative_eq!(complementary(&half_sq, 1.0).unwrap(), 0.5, max_relative = 1e-8);
        let sq = YoungFunction::power(2.0).unwrap();
        for s in [0.1, 1.0, 3.0, 40.0] {
            assert_relative_eq!(complementary(&sq, s).unwrap(), s * s / 4.0, max_relative = 1e-8);
        }
        // exp L: Ψ̄(s) = s ln s - s + 1 for s >= 1, 0 below
        let e = YoungFunction::expl();
        for s in [0.5f64, 1.0, 2.0, 10.0] {
            let exact = if s >= 1.0 { s * s.ln() - s + 1.0 } else { 0.0 };
            assert!((complementary(&e, s).unwrap() - exact).abs() <= 1e-8 * exact.max(1e-8));
        }
        let id = YoungFunction::identity();
        assert_eq!(complementary(&id, 0.5).unwrap(), 0.0);
        assert!(matches!(complementary(&id, 2.0), Err(Error::Numeric(_))));
    }

    #[test]
    fn holder_examples() {
        let g = grid8();
        let q = DyadicLattice::unshifted(g).cube(3, 0);
        let sq = YoungFunction::power(2.0).unwrap();
        let one = SampledFunction::constant(g, 1.0);
        let h = generalized_holder_check(&one, &one, &q, &sq).unwrap();
        assert_relative_eq!(h.lhs, 1.0);
        assert!(h.holds);
        let z = SampledFunction::zeros(g);
        let h = generalized_holder_check(&z, &one, &q, &sq).unwrap();
        assert_eq!(h.lhs, 0.0);
        assert!(h.holds);
    }
}
