use super::{sparse_commutator_forms, sparse_operator, b_psi_operator, SparseFamily};
use crate::error::{Error, Result};
use crate::grid::{lp_norm, SampledFunction, Scope};
use crate::maximal::{hl_maximal, orlicz_maximal, power_maximal, YoungFunction};
use crate::weights::{fujii_wilson_on_lattice, BmoSymbol, Weight};
use serde::Serialize;

/// Outcome of the weighted Carleson embedding test.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CarlesonReport {
    /// `max_R Σ_{Q ⊆ R} w(Q) / w(R)` over the family.
    pub a_witness: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
    /// `[w]_{A_∞}` on the family's lattice.
    pub a_inf: f64,
    pub eta: f64,
    /// `a_witness <= [w]_{A_∞} / η`.
    pub bound_holds: bool,
}

fn cube_weights(s: &SparseFamily, w: &Weight) -> Result<Vec<f64>> {
    let vol = s.grid.cell_volume();
    s.cubes
        .iter()
        .map(|q| {
            let m: f64 = q.cells(&s.grid).map(|c| w.values()[c]).sum::<f64>() * vol;
            if m > 0.0 {
                Ok(m)
            } else {
                Err(Error::DegenerateWeight(format!("w(Q) = 0 on {q:?}")))
            }
        })
        .collect()
}

/// `(Σ_Q w(Q) ⟨f⟩^w_Q^p)^{1/p} <= A^{1/p} p' ‖f‖_{L^p(w)}` with `A` the
/// family's own Carleson constant.
pub fn carleson_check(
    s: &SparseFamily,
    w: &Weight,
    f: &SampledFunction,
    p: f64,
) -> Result<CarlesonReport> {
    if !(p > 1.0) || !p.is_finite() {
        return Err(Error::param("p", p, "Carleson embedding needs 1 < p < inf"));
    }
    s.grid.ensure_same(f.grid())?;
    s.grid.ensure_same(w.function().grid())?;
    let wq = cube_weights(s, w)?;
    let mut a_witness: f64 = 0.0;
    for (r, wr) in s.cubes.iter().zip(&wq) {
        let inside: f64 = s
            .cubes
            .iter()
            .zip(&wq)
            .filter(|(q, _)| q.is_within(r))
            .map(|(_, m)| m)
            .sum();
        a_witness = a_witness.max(inside / wr);
    }
    let vol = s.grid.cell_volume();
    let mut sum = 0.0;
    for (q, m) in s.cubes.iter().zip(&wq) {
        let fw: f64 = q
            .cells(&s.grid)
            .map(|c| f.values()[c].abs() * w.values()[c])
            .sum::<f64>()
            * vol;
        sum += m * (fw / m).powf(p);
    }
    let lhs = sum.powf(1.0 / p);
    let p_dual = p / (p - 1.0);
    let rhs = a_witness.powf(1.0 / p) * p_dual * lp_norm(f, w.function(), p)?;
    let a_inf = fujii_wilson_on_lattice(w, &s.lattice())?;
    Ok(CarlesonReport {
        a_witness,
        lhs,
        rhs,
        holds: lhs <= rhs * (1.0 + 1e-9),
        a_inf,
        eta: s.eta,
        bound_holds: a_witness <= a_inf / s.eta * (1.0 + 1e-9),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OrliczSparseReport {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
    pub a_inf: f64,
    pub eta: f64,
}

/// `‖B_S f‖_{L¹(w)} <= (4/η) [w]_{A_∞} ‖M_{Ψ(L)} f‖_{L¹(w)}`, all on the
/// family's lattice.
pub fn orlicz_sparse_check(
    s: &SparseFamily,
    w: &Weight,
    f: &SampledFunction,
    psi: &YoungFunction,
) -> Result<OrliczSparseReport> {
    s.grid.ensure_same(w.function().grid())?;
    let b = b_psi_operator(s, f, psi)?;
    let m = orlicz_maximal(f, psi, Scope::Lattice(s.lattice))?;
    let a_inf = fujii_wilson_on_lattice(w, &s.lattice())?;
    let lhs = lp_norm(&b, w.function(), 1.0)?;
    let rhs = 4.0 / s.eta * a_inf * lp_norm(&m, w.function(), 1.0)?;
    Ok(OrliczSparseReport {
        lhs,
        rhs,
        holds: lhs <= rhs * (1.0 + 1e-9),
        a_inf,
        eta: s.eta,
    })
}

/// Pointwise fit of `|direct| <= c Σ_j (sparse bound)_j`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DominationFit {
    /// `max_x |direct(x)| / Σ_j bound_j(x)` over cells with a positive bound.
    pub c_fit: f64,
    pub argmax: usize,
    /// Cells where the bound vanishes but `|direct|` exceeds the tolerance.
    pub violations: usize,
    pub tolerance: f64,
}

fn fit(direct: &SampledFunction, bound: &[f64]) -> DominationFit {
    let tolerance = 1e-9 * direct.max_abs();
    let mut c_fit: f64 = 0.0;
    let mut argmax = 0;
    let mut violations = 0;
    for (i, (&d, &b)) in direct.values().iter().zip(bound).enumerate() {
        if b > 0.0 {
            let r = d.abs() / b;
            if r > c_fit {
                c_fit = r;
                argmax = i;
            }
        } else if d.abs() > tolerance {
            violations += 1;
        }
    }
    DominationFit {
        c_fit,
        argmax,
        violations,
        tolerance,
    }
}

/// Fit of `|T f| <= c Σ_j A_{S_j} f`.
pub fn domination_fit(
    f: &SampledFunction,
    direct: &SampledFunction,
    families: &[SparseFamily],
) -> Result<DominationFit> {
    f.grid().ensure_same(direct.grid())?;
    let mut bound = vec![0.0; f.grid().len()];
    for s in families {
        let a = sparse_operator(s, f)?;
        bound.iter_mut().zip(a.values()).for_each(|(b, v)| *b += v);
    }
    Ok(fit(direct, &bound))
}

/// Fit of `|[b, T] f| <= c Σ_j (T_{S_j,b} + T*_{S_j,b}) |f|`.
pub fn domination_fit_commutator(
    f: &SampledFunction,
    direct: &SampledFunction,
    families: &[SparseFamily],
    b: &BmoSymbol,
) -> Result<DominationFit> {
    f.grid().ensure_same(direct.grid())?;
    let mut bound = vec![0.0; f.grid().len()];
    for s in families {
        let (t, ts) = sparse_commutator_forms(s, b, f)?;
        for (i, v) in bound.iter_mut().enumerate() {
            *v += t.values()[i] + ts.values()[i];
        }
    }
    Ok(fit(direct, &bound))
}

/// `(‖A_S g‖_{L^{p'}(σ)}, p' ‖M g‖_{L^{p'}(σ)})` with `σ = (M_r w)^{1-p'}`.
pub fn dual_sparse_ratio(
    s: &SparseFamily,
    g: &SampledFunction,
    w: &Weight,
    p: f64,
    r: f64,
) -> Result<(f64, f64)> {
    if !(p > 1.0) || !p.is_finite() {
        return Err(Error::param("p", p, "needs 1 < p < inf"));
    }
    let p_dual = p / (p - 1.0);
    let mrw = power_maximal(w.function(), r, Scope::Full)?;
    if mrw.values().iter().any(|&v| v <= 0.0) {
        return Err(Error::DegenerateWeight("M_r w vanishes somewhere".into()));
    }
    let sigma = mrw.map(|v| v.powf(1.0 - p_dual));
    let a = sparse_operator(s, g)?;
    let m = hl_maximal(g, Scope::Full);
    Ok((
        lp_norm(&a, &sigma, p_dual)?,
        p_dual * lp_norm(&m, &sigma, p_dual)?,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{DyadicLattice, GridSpec};
    use crate::sparse::{build_sparse_family, CellSet};
    use crate::weights::{make_weight, WeightKind};

    #[test]
    fn single_cube_has_unit_carleson_constant() {
        let g = GridSpec::unit_1d(16).unwrap();
        let l = DyadicLattice::unshifted(g);
        let fam = SparseFamily {
            grid: g,
            lattice: 0,
            eta: 1.0,
            cubes: vec![l.cube(4, 0)],
            witnesses: vec![CellSet::from_sorted(0..16)],
        };
        let w = make_weight(&WeightKind::Power(0.5), &GridSpec::new_1d(-1.0, 1.0, 16).unwrap())
            .unwrap();
        let w = Weight::new(SampledFunction::new(g, w.values().to_vec()).unwrap()).unwrap();
        let f = SampledFunction::from_fn(g, |x| x[0].sin() + 2.0).unwrap();
        let rep = carleson_check(&fam, &w, &f, 2.0).unwrap();
        assert_eq!(rep.a_witness, 1.0);
        assert!(rep.holds && rep.bound_holds);
    }

    #[test]
    fn nested_chain_with_unit_weight() {
        // chain of lengths 16, 8, 4, 2, 1 inside [0, 1): A = 1 + 1/2 + ... + 1/16
        let g = GridSpec::unit_1d(16).unwrap();
        let mut v = vec![0.0; 16];
        v[0] = 1.0;
        let f = SampledFunction::new(g, v).unwrap();
        let fam = build_sparse_family(&f, &DyadicLattice::unshifted(g), 1.5).unwrap();
        assert_eq!(fam.len(), 5);
        let w = Weight::new(SampledFunction::constant(g, 1.0)).unwrap();
        let rep = carleson_check(&fam, &w, &f, 3.0).unwrap();
        assert!((rep.a_witness - 1.9375).abs() < 1e-15);
        assert!(rep.holds && rep.bound_holds);
    }

    #[test]
    fn orlicz_sparse_trivial_cases() {
        let g = GridSpec::unit_1d(16).unwrap();
        let l = DyadicLattice::unshifted(g);
        let f = SampledFunction::from_fn(g, |x| (5.0 * x[0]).cos()).unwrap();
        let fam = SparseFamily {
            grid: g,
            lattice: 0,
            eta: 1.0,
            cubes: vec![l.cube(4, 0)],
            witnesses: vec![CellSet::from_sorted(0..16)],
        };
        let w = Weight::new(SampledFunction::constant(g, 1.0)).unwrap();
        let rep = orlicz_sparse_check(&fam, &w, &f, &YoungFunction::identity()).unwrap();
        assert!(rep.holds);
        let avg = f.values().iter().map(|v| v.abs()).sum::<f64>() / 16.0;
        assert!((rep.lhs - avg).abs() < 1e-12);
        let zero = orlicz_sparse_check(&fam, &w, &SampledFunction::zeros(g), &YoungFunction::llogl1())
            .unwrap();
        assert_eq!((zero.lhs, zero.rhs, zero.holds), (0.0, 0.0, true));
    }

    #[test]
    fn domination_of_zero_is_zero() {
        let g = GridSpec::unit_1d(16).unwrap();
        let z = SampledFunction::zeros(g);
        let fit = domination_fit(&z, &z, &[]).unwrap();
        assert_eq!((fit.c_fit, fit.violations), (0.0, 0));
        let one = SampledFunction::constant(g, 1.0);
        assert_eq!(domination_fit(&z, &one, &[]).unwrap().violations, 16);
    }
}
