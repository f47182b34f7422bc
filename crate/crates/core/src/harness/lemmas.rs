//! Seeded `(w, f, S, Ψ)` corpus and the inequalities with explicit constants.

use super::corpus::TestFunction;
use super::ratios::RatioRow;
use crate::error::Result;
use crate::grid::{DyadicLattice, GridSpec, SampledFunction, Scope};
use crate::maximal::{hl_maximal, orlicz_maximal, power_maximal, rubio_de_francia, RdfOptions, YoungFunction};
use crate::sparse::{build_sparse_family, carleson_check, dual_sparse_ratio, orlicz_sparse_check, SparseFamily};
use crate::weights::{make_weight, rhi_check, Weight, WeightKind};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// One member of the corpus.
pub struct CorpusCase {
    pub seed: u64,
    pub weight_kind: WeightKind,
    pub weight: Weight,
    pub function: TestFunction,
    pub f: SampledFunction,
    pub family: SparseFamily,
    pub psi: YoungFunction,
    pub p: f64,
}

const YOUNG: [&str; 5] = ["identity", "llogl:1", "llogl:2", "power:1.5", "power:2"];

/// Deterministic case `seed`: a random weight, a random step or bump
/// function, its stopping family on a random lattice, a Young function and
/// an exponent from `ps`.
pub fn corpus_case(seed: u64, grid: &GridSpec, lambda: f64, ps: &[f64]) -> Result<CorpusCase> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (lo, hi) = (grid.lower()[0], grid.upper()[0]);
    let span = hi - lo;
    let weight_kind = match rng.random_range(0..4) {
        0 => WeightKind::Power(rng.random_range(-0.9..0.9) * grid.dim() as f64),
        1 => WeightKind::LogNormal {
            sigma: rng.random_range(0.2..1.2),
            seed: rng.random(),
        },
        2 => {
            let n = rng.random_range(2..9);
            WeightKind::Step((0..n).map(|_| 10f64.powf(rng.random_range(-1.0..1.0))).collect())
        }
        _ => WeightKind::Constant(rng.random_range(0.5..2.0)),
    };
    let function = if rng.random_bool(0.5) {
        let a = lo + rng.random_range(0.1..0.6) * span;
        TestFunction::Random {
            lo: a,
            hi: a + rng.random_range(0.1..0.35) * span,
            pieces: rng.random_range(1..8),
            seed: rng.random(),
        }
    } else {
        TestFunction::Bump {
            center: lo + rng.random_range(0.25..0.75) * span,
            radius: rng.random_range(0.03..0.25) * span,
        }
    };
    let f = function.sample(grid)?;
    let lattice = DyadicLattice::shifted(*grid, rng.random_range(0..DyadicLattice::count(grid.dim())));
    let family = build_sparse_family(&f, &lattice, lambda)?;
    let psi = YoungFunction::parse(YOUNG[rng.random_range(0..YOUNG.len())])?;
    let p = ps[rng.random_range(0..ps.len())];
    Ok(CorpusCase {
        seed,
        weight: make_weight(&weight_kind, grid)?,
        weight_kind,
        function,
        f,
        family,
        psi,
        p,
    })
}

fn base_row(c: &CorpusCase, p: f64) -> RatioRow {
    let mut row = RatioRow::blank(p);
    row.function = c.function.label();
    row.weight = c.weight_kind.label();
    row
}

fn pointwise_row(row: RatioRow, lhs: &SampledFunction, rhs: &SampledFunction) -> Result<RatioRow> {
    // the worst cell decides; cells where both sides vanish carry no information
    let mut best = (0.0, 0.0, 0.0);
    for (&a, &b) in lhs.values().iter().zip(rhs.values()) {
        let r = if b > 0.0 { a / b } else if a > 0.0 { f64::INFINITY } else { 0.0 };
        if r > best.0 {
            best = (r, a, b);
        }
    }
    row.finish(1.0, best.2, best.1)
}

/// `max_Q ⟨w^{r_w}⟩^{1/r_w} / ⟨w⟩_Q`, one row per case.
pub fn rhi_row(c: &CorpusCase, tau: f64, scope: Scope) -> Result<RatioRow> {
    let rep = rhi_check(&c.weight, tau, scope)?;
    let mut row = base_row(c, 1.0);
    row.r = Some(rep.r_w);
    row.a_inf = Some(rep.a_inf);
    row.detail = format!("seed={};tau={tau}", c.seed);
    row.finish(1.0, 1.0, rep.worst_ratio)
}

/// The two links of `Mf <= M_{L log L} f <= r' M_r f` as pointwise rows.
pub fn chain_rows(c: &CorpusCase, rs: &[f64], scope: Scope) -> Result<Vec<RatioRow>> {
    let m = hl_maximal(&c.f, scope);
    let mllogl = orlicz_maximal(&c.f, &YoungFunction::llogl1(), scope)?;
    let mut row = base_row(c, 1.0);
    row.detail = format!("seed={};link=M<=MLlogL", c.seed);
    let mut rows = vec![pointwise_row(row, &m, &mllogl)?];
    for &r in rs {
        let mr = power_maximal(&c.f, r, scope)?.scale(r / (r - 1.0));
        let mut row = base_row(c, 1.0);
        row.r = Some(r);
        row.detail = format!("seed={};link=MLlogL<=r'Mr", c.seed);
        rows.push(pointwise_row(row, &mllogl, &mr)?);
    }
    Ok(rows)
}

/// Carleson embedding with `A = A_witness`; the second value flags
/// `A_witness <= [w]_{A_∞}/η` on the family's lattice.
pub fn carleson_row(c: &CorpusCase) -> Result<(RatioRow, bool)> {
    let rep = carleson_check(&c.family, &c.weight, &c.f, c.p)?;
    let p_dual = c.p / (c.p - 1.0);
    let factor = rep.a_witness.powf(1.0 / c.p) * p_dual;
    let mut row = base_row(c, c.p);
    row.a_inf = Some(rep.a_inf);
    row.detail = format!(
        "seed={};lattice={};eta={};a_witness={}",
        c.seed, c.family.lattice, rep.eta, rep.a_witness
    );
    Ok((row.finish(factor, rep.rhs / factor, rep.lhs)?, rep.bound_holds))
}

pub fn orlicz_sparse_row(c: &CorpusCase) -> Result<RatioRow> {
    let rep = orlicz_sparse_check(&c.family, &c.weight, &c.f, &c.psi)?;
    let factor = 4.0 / rep.eta * rep.a_inf;
    let mut row = base_row(c, 1.0);
    row.a_inf = Some(rep.a_inf);
    row.detail = format!(
        "seed={};lattice={};eta={};psi={}",
        c.seed,
        c.family.lattice,
        rep.eta,
        c.psi.label()
    );
    let norm = if factor > 0.0 { rep.rhs / factor } else { 0.0 };
    row.finish(factor, norm, rep.lhs)
}

/// `h <= R h` pointwise and `‖R h‖ <= 2 ‖h‖` in `L^p(M_r w)`, with `h = |f|`.
pub fn rdf_rows(c: &CorpusCase, r: f64, tol: f64) -> Result<[RatioRow; 2]> {
    let h = c.f.abs();
    let opts = RdfOptions {
        tol,
        ..RdfOptions::default()
    };
    let res = rubio_de_francia(&h, c.weight.function(), c.p, r, opts)?;
    let mut a = base_row(c, c.p);
    a.r = Some(r);
    a.detail = format!("seed={};property=majorant;terms={}", c.seed, res.terms);
    let a = pointwise_row(a, &h, &res.majorant)?;
    let mut b = base_row(c, c.p);
    b.r = Some(r);
    b.detail = format!("seed={};property=norm;terms={}", c.seed, res.terms);
    let b = b.finish(2.0, res.h_norm, res.majorant_norm)?;
    Ok([a, b])
}

/// `‖A_S g‖_{L^{p'}(σ)} / (p' ‖Mg‖_{L^{p'}(σ)})` with `g = |f|`.
pub fn dual_sparse_row(c: &CorpusCase, r: f64) -> Result<RatioRow> {
    let (lhs, rhs) = dual_sparse_ratio(&c.family, &c.f.abs(), &c.weight, c.p, r)?;
    let p_dual = c.p / (c.p - 1.0);
    let mut row = base_row(c, c.p);
    row.r = Some(r);
    row.detail = format!("seed={};lattice={}", c.seed, c.family.lattice);
    row.finish(p_dual, rhs / p_dual, lhs)
}
