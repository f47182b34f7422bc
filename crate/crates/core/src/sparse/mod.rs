//! Sparse families of dyadic cubes and the operators built on them.
//!
//! Families come from a stopping time on `|f|`: below each selected cube `Q`
//! the maximal descendants with average above `Λ ⟨|f|⟩_Q` are selected, and
//! the witness `E_Q` is `Q` minus those descendants.

mod checks;

pub use checks::{
    carleson_check, domination_fit, domination_fit_commutator, dual_sparse_ratio, orlicz_sparse_check,
    CarlesonReport, DominationFit, OrliczSparseReport,
};

use crate::error::{Error, Result};
use crate::grid::{Cube, DyadicLattice, GridSpec, SampledFunction};
use crate::maximal::{luxemburg_norm, YoungFunction};
use crate::weights::BmoSymbol;
use serde::{Deserialize, Serialize};
use std::io::{Read, Write};

/// A set of cells stored as sorted half-open ranges.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct CellSet(Vec<[usize; 2]>);

impl CellSet {
    /// From cells in increasing order.
    pub fn from_sorted(cells: impl IntoIterator<Item = usize>) -> Self {
        let mut ranges: Vec<[usize; 2]> = Vec::new();
        for c in cells {
            match ranges.last_mut() {
                Some(r) if r[1] == c => r[1] += 1,
                _ => ranges.push([c, c + 1]),
            }
        }
        Self(ranges)
    }

    pub fn len(&self) -> usize {
        self.0.iter().map(|r| r[1] - r[0]).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().flat_map(|r| r[0]..r[1])
    }

    pub fn ranges(&self) -> &[[usize; 2]] {
        &self.0
    }
}

/// Cubes of one lattice, each with a witness set `E_Q ⊆ Q`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SparseFamily {
    pub grid: GridSpec,
    pub lattice: usize,
    /// Declared sparseness `η`.
    pub eta: f64,
    pub cubes: Vec<Cube>,
    pub witnesses: Vec<CellSet>,
}

/// Result of [`verify_sparsity`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SparsityReport {
    /// `min_Q |E_Q| / |Q|`, 1 for an empty family.
    pub eta_actual: f64,
    pub disjoint: bool,
    pub contained: bool,
    pub ok: bool,
}

impl SparseFamily {
    pub fn len(&self) -> usize {
        self.cubes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cubes.is_empty()
    }

    pub fn lattice(&self) -> DyadicLattice {
        DyadicLattice::shifted(self.grid, self.lattice)
    }

    pub fn write_json(&self, out: impl Write) -> Result<()> {
        serde_json::to_writer_pretty(out, self)?;
        Ok(())
    }

    /// Reads a family and re-verifies it; a family failing [`verify_sparsity`]
    /// is rejected.
    pub fn read_json(input: impl Read) -> Result<Self> {
        let fam: Self = serde_json::from_reader(input)?;
        if fam.cubes.len() != fam.witnesses.len() {
            return Err(Error::Domain("family has unequal cube and witness counts".into()));
        }
        for q in &fam.cubes {
            q.check_within(&fam.grid)?;
        }
        let rep = verify_sparsity(&fam);
        if !rep.ok {
            return Err(Error::Domain(format!(
                "imported family fails the sparsity check: {rep:?}"
            )));
        }
        Ok(fam)
    }
}

/// Stopping-time family of `|f|` on `lattice` with threshold `Λ`.
///
/// Every stopping child `Q'` of `Q` has `|Q'| < ⟨|f|⟩_{Q'} |Q'| / (Λ ⟨|f|⟩_Q)`,
/// so they cover less than `|Q| / Λ` and `η >= 1 - 1/Λ`.
pub fn build_sparse_family(
    f: &SampledFunction,
    lattice: &DyadicLattice,
    lambda: f64,
) -> Result<SparseFamily> {
    if !(lambda > 1.0) || !lambda.is_finite() {
        return Err(Error::param("lambda", lambda, "stopping threshold needs lambda > 1"));
    }
    f.grid().ensure_same(lattice.grid())?;
    if f.max_abs() == 0.0 {
        return Err(Error::DegenerateInput("f vanishes identically".into()));
    }
    let grid = *f.grid();
    let abs: Vec<f64> = f.values().iter().map(|v| v.abs()).collect();
    let means = lattice.level_means(&abs);
    let top = lattice.top_level();

    let mut selected: Vec<(u32, usize)> = (0..lattice.cubes_at(top))
        .filter(|&i| means[top as usize][i] > 0.0)
        .map(|i| (top, i))
        .collect();
    let mut cubes = Vec::new();
    let mut witnesses = Vec::new();
    let mut covered = vec![false; grid.len()];
    let mut next = 0;
    while next < selected.len() {
        let (level, local) = selected[next];
        next += 1;
        let threshold = lambda * means[level as usize][local];
        let mut stops = Vec::new();
        let mut stack = vec![(level, local)];
        while let Some((k, i)) = stack.pop() {
            if k == 0 {
                continue;
            }
            for c in lattice.children_of(k, i) {
                if means[k as usize - 1][c] > threshold {
                    stops.push((k - 1, c));
                } else {
                    stack.push((k - 1, c));
                }
            }
        }
        let q = lattice.cube(level, local);
        for &(k, i) in &stops {
            for cell in lattice.cube(k, i).cells(&grid) {
                covered[cell] = true;
            }
        }
        let mut e: Vec<usize> = q.cells(&grid).filter(|&c| !covered[c]).collect();
        e.sort_unstable();
        for &(k, i) in &stops {
            for cell in lattice.cube(k, i).cells(&grid) {
                covered[cell] = false;
            }
        }
        cubes.push(q);
        witnesses.push(CellSet::from_sorted(e));
        selected.extend(stops);
    }
    let mut fam = SparseFamily {
        grid,
        lattice: lattice.id(),
        eta: 1.0,
        cubes,
        witnesses,
    };
    let rep = verify_sparsity(&fam);
    if !(rep.disjoint && rep.contained) || rep.eta_actual < 1.0 - 1.0 / lambda {
        return Err(Error::Numeric(format!(
            "stopping time produced eta = {} below 1 - 1/lambda",
            rep.eta_actual
        )));
    }
    fam.eta = rep.eta_actual;
    Ok(fam)
}

/// One family per shifted lattice, in lattice order.
pub fn build_families(f: &SampledFunction, lambda: f64) -> Result<Vec<SparseFamily>> {
    DyadicLattice::all(*f.grid())
        .iter()
        .map(|l| build_sparse_family(f, l, lambda))
        .collect()
}

/// Recomputes containment, disjointness and the worst witness fraction.
pub fn verify_sparsity(s: &SparseFamily) -> SparsityReport {
    let mut seen = vec![false; s.grid.len()];
    let mut disjoint = s.cubes.len() == s.witnesses.len();
    let mut contained = true;
    let mut eta_actual: f64 = 1.0;
    for (q, e) in s.cubes.iter().zip(&s.witnesses) {
        if q.lattice != s.lattice {
            contained = false;
        }
        for c in e.iter() {
            if c >= seen.len() || !q.contains_cell(&s.grid, c) {
                contained = false;
                continue;
            }
            if seen[c] {
                disjoint = false;
            }
            seen[c] = true;
        }
        eta_actual = eta_actual.min(e.len() as f64 / q.cell_count() as f64);
    }
    SparsityReport {
        eta_actual,
        disjoint,
        contained,
        ok: disjoint && contained && eta_actual >= s.eta - 1e-12,
    }
}

fn check_grid(s: &SparseFamily, f: &SampledFunction) -> Result<()> {
    s.grid.ensure_same(f.grid())
}

fn cube_mean(vals: &[f64], q: &Cube, grid: &GridSpec) -> f64 {
    q.cells(grid).map(|c| vals[c]).sum::<f64>() / q.cell_count() as f64
}

/// `A_S f = Σ_{Q ∈ S} ⟨|f|⟩_Q χ_Q`.
pub fn sparse_operator(s: &SparseFamily, f: &SampledFunction) -> Result<SampledFunction> {
    check_grid(s, f)?;
    let abs: Vec<f64> = f.values().iter().map(|v| v.abs()).collect();
    let mut out = vec![0.0; s.grid.len()];
    for q in &s.cubes {
        let avg = cube_mean(&abs, q, &s.grid);
        for c in q.cells(&s.grid) {
            out[c] += avg;
        }
    }
    SampledFunction::new(s.grid, out)
}

/// `(T_{S,b}|f|, T*_{S,b}|f|)`: `Σ_Q |b(x) - b_Q| ⟨|f|⟩_Q χ_Q` and
/// `Σ_Q ⟨|b - b_Q| |f|⟩_Q χ_Q`.
pub fn sparse_commutator_forms(
    s: &SparseFamily,
    b: &BmoSymbol,
    f: &SampledFunction,
) -> Result<(SampledFunction, SampledFunction)> {
    check_grid(s, f)?;
    check_grid(s, b.function())?;
    let bv = b.values();
    let fv: Vec<f64> = f.values().iter().map(|v| v.abs()).collect();
    let mut t = vec![0.0; s.grid.len()];
    let mut t_star = vec![0.0; s.grid.len()];
    for q in &s.cubes {
        let bq = cube_mean(bv, q, &s.grid);
        let fq = cube_mean(&fv, q, &s.grid);
        let osc = q.cells(&s.grid).map(|c| (bv[c] - bq).abs() * fv[c]).sum::<f64>()
            / q.cell_count() as f64;
        for c in q.cells(&s.grid) {
            t[c] += (bv[c] - bq).abs() * fq;
            t_star[c] += osc;
        }
    }
    Ok((
        SampledFunction::new(s.grid, t)?,
        SampledFunction::new(s.grid, t_star)?,
    ))
}

/// `B_S f = Σ_{Q ∈ S} ‖f‖_{Ψ(L),Q} χ_Q`.
pub fn b_psi_operator(
    s: &SparseFamily,
    f: &SampledFunction,
    psi: &YoungFunction,
) -> Result<SampledFunction> {
    check_grid(s, f)?;
    let norms = s
        .cubes
        .iter()
        .map(|q| luxemburg_norm(f, q, psi))
        .collect::<Result<Vec<f64>>>()?;
    let mut out = vec![0.0; s.grid.len()];
    for (q, n) in s.cubes.iter().zip(norms) {
        for c in q.cells(&s.grid) {
            out[c] += n;
        }
    }
    SampledFunction::new(s.grid, out)
}
