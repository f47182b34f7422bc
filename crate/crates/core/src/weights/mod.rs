//! Weight characteristics on dyadic lattices: `[w]_{A_p}`, `[w]_{A_1}`, the
//! Fujii–Wilson `[w]_{A_∞}`, the sharp reverse Hölder check, BMO norms and
//! the `e^{sb} ∈ A_p` observation.
//!
//! All suprema are discrete: over the cubes of the selected [`Scope`], with
//! the essential supremum of a cell function being its maximum.

mod generate;

pub use generate::{make_symbol, make_weight, SymbolKind, WeightKind};

use crate::error::{Error, Result};
use crate::grid::{DyadicLattice, SampledFunction, Scope};
use crate::maximal::hl_maximal;
use std::collections::HashMap;
use std::sync::Mutex;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum CacheKey {
    Ap(u64, Scope),
    A1(Scope),
    AInf(Scope),
}

/// A nonnegative, not identically zero function used as a measure density,
/// with write-once caches of its constants.
#[derive(Debug)]
pub struct Weight {
    base: SampledFunction,
    cache: Mutex<HashMap<CacheKey, f64>>,
}

impl Clone for Weight {
    fn clone(&self) -> Self {
        Self {
            base: self.base.clone(),
            cache: Mutex::new(self.cache.lock().expect("weight cache").clone()),
        }
    }
}

impl Weight {
    pub fn new(base: SampledFunction) -> Result<Self> {
        if !base.is_nonnegative() {
            return Err(Error::Domain("weights must be nonnegative".into()));
        }
        if base.values().iter().all(|&v| v == 0.0) {
            return Err(Error::DegenerateWeight("weight vanishes identically".into()));
        }
        Ok(Self {
            base,
            cache: Mutex::new(HashMap::new()),
        })
    }

    pub fn function(&self) -> &SampledFunction {
        &self.base
    }

    pub fn values(&self) -> &[f64] {
        self.base.values()
    }

    /// `c · w`, with fresh caches.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        Self::new(self.base.scale(c))
    }

    fn cached(&self, key: CacheKey, compute: impl FnOnce() -> Result<f64>) -> Result<f64> {
        if let Some(&v) = self.cache.lock().expect("weight cache").get(&key) {
            return Ok(v);
        }
        let v = compute()?;
        self.cache
            .lock()
            .expect("weight cache")
            .entry(key)
            .or_insert(v);
        Ok(v)
    }

    pub fn ap(&self, p: f64, scope: Scope) -> Result<f64> {
        self.cached(CacheKey::Ap(p.to_bits(), scope), || {
            ap_constant(self, p, scope)
        })
    }

    pub fn a1(&self, scope: Scope) -> Result<f64> {
        self.cached(CacheKey::A1(scope), || a1_constant(self, scope))
    }

    pub fn a_inf(&self, scope: Scope) -> Result<f64> {
        self.cached(CacheKey::AInf(scope), || fujii_wilson_constant(self, scope))
    }

    fn require_positive(&self) -> Result<()> {
        match self.values().iter().position(|&v| !(v > 0.0)) {
            Some(i) => Err(Error::DegenerateWeight(format!(
                "weight vanishes at cell {i}; dual averages diverge"
            ))),
            None => Ok(()),
        }
    }
}

/// `sup_Q ⟨w⟩_Q ⟨w^{-1/(p-1)}⟩_Q^{p-1}`.
pub fn ap_constant(w: &Weight, p: f64, scope: Scope) -> Result<f64> {
    if !(p > 1.0) || !p.is_finite() {
        return Err(Error::param("p", p, "A_p constant needs 1 < p < inf"));
    }
    w.require_positive()?;
    let dual: Vec<f64> = w.values().iter().map(|&v| v.powf(-1.0 / (p - 1.0))).collect();
    let mut best: f64 = 0.0;
    for lattice in scope.lattices(w.function().grid()) {
        let mw = lattice.level_means(w.values());
        let md = lattice.level_means(&dual);
        for (a, b) in mw.iter().flatten().zip(md.iter().flatten()) {
            best = best.max(a * b.powf(p - 1.0));
        }
    }
    Ok(best)
}

/// `max_x Mw(x) / w(x)`.
pub fn a1_constant(w: &Weight, scope: Scope) -> Result<f64> {
    w.require_positive()?;
    let m = hl_maximal(w.function(), scope);
    Ok(m
        .values()
        .iter()
        .zip(w.values())
        .map(|(a, b)| a / b)
        .fold(0.0, f64::max))
}

/// Fujii–Wilson constant `sup_Q w(Q)^{-1} ∫_Q M(χ_Q w)` within one lattice.
///
/// Inside `Q` the only lattice cubes not contained in `Q` are its ancestors,
/// whose averages of `χ_Q w` never exceed `⟨w⟩_Q`, so `M(χ_Q w)(x)` is the
/// running maximum of `⟨w⟩_R` along the chain `x ∈ R ⊆ Q`.
pub fn fujii_wilson_on_lattice(w: &Weight, lattice: &DyadicLattice) -> Result<f64> {
    let vals = w.values();
    let means = lattice.level_means(vals);
    let sums = lattice.level_sums(vals);
    let mut acc: Vec<Vec<f64>> = means.iter().map(|l| vec![0.0; l.len()]).collect();
    for cell in 0..vals.len() {
        let mut running = f64::NEG_INFINITY;
        for (k, level) in means.iter().enumerate() {
            let q = lattice.cube_of(k as u32, cell);
            running = running.max(level[q]);
            acc[k][q] += running;
        }
    }
    let mut best: f64 = 0.0;
    for (a, s) in acc.iter().flatten().zip(sums.iter().flatten()) {
        // w(Q) = 0 forces M(w 1_Q) = 0 on Q
        if *s > 0.0 {
            best = best.max(a / s);
        }
    }
    Ok(best)
}

/// `[w]_{A_∞}`; for [`Scope::Full`] the maximum of the per-lattice constants.
pub fn fujii_wilson_constant(w: &Weight, scope: Scope) -> Result<f64> {
    scope
        .lattices(w.function().grid())
        .iter()
        .map(|l| fujii_wilson_on_lattice(w, l))
        .try_fold(0.0f64, |m, v| v.map(|v| m.max(v)))
}

/// Result of the sharp reverse Hölder inequality test.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RhiCheck {
    pub r_w: f64,
    pub a_inf: f64,
    pub worst_ratio: f64,
    pub holds: bool,
}

/// `r_w = 1 + 1/(τ [w]_{A_∞})` and `max_Q ⟨w^{r_w}⟩_Q^{1/r_w} / ⟨w⟩_Q` against 2.
pub fn rhi_check(w: &Weight, tau: f64, scope: Scope) -> Result<RhiCheck> {
    if !(tau > 0.0) || !tau.is_finite() {
        return Err(Error::param("tau", tau, "must be positive"));
    }
    let a_inf = w.a_inf(scope)?;
    let r = 1.0 + 1.0 / (tau * a_inf);
    let powered: Vec<f64> = w.values().iter().map(|v| v.powf(r)).collect();
    let mut worst: f64 = 0.0;
    for lattice in scope.lattices(w.function().grid()) {
        let mw = lattice.level_means(w.values());
        let mr = lattice.level_means(&powered);
        for (a, b) in mw.iter().flatten().zip(mr.iter().flatten()) {
            if *a > 0.0 {
                worst = worst.max(b.powf(1.0 / r) / a);
            }
        }
    }
    Ok(RhiCheck {
        r_w: r,
        a_inf,
        worst_ratio: worst,
        holds: worst <= 2.0 + 1e-9,
    })
}

/// A real function in BMO, with a per-scope cache of its norm.
#[derive(Debug)]
pub struct BmoSymbol {
    base: SampledFunction,
    cache: Mutex<HashMap<Scope, f64>>,
}

impl Clone for BmoSymbol {
    fn clone(&self) -> Self {
        Self {
            base: self.base.clone(),
            cache: Mutex::new(self.cache.lock().expect("symbol cache").clone()),
        }
    }
}

impl BmoSymbol {
    pub fn new(base: SampledFunction) -> Self {
        Self {
            base,
            cache: Mutex::new(HashMap::new()),
        }
    }

    pub fn function(&self) -> &SampledFunction {
        &self.base
    }

    pub fn values(&self) -> &[f64] {
        self.base.values()
    }

    pub fn norm(&self, scope: Scope) -> f64 {
        if let Some(&v) = self.cache.lock().expect("symbol cache").get(&scope) {
            return v;
        }
        let v = bmo_norm(self, scope);
        self.cache.lock().expect("symbol cache").insert(scope, v);
        v
    }

    /// `b / ‖b‖_BMO`; constant symbols are returned unchanged.
    pub fn normalized(&self, scope: Scope) -> Self {
        let n = self.norm(scope);
        if n > 0.0 {
            Self::new(self.base.scale(1.0 / n))
        } else {
            self.clone()
        }
    }
}

/// `sup_Q ⟨|b - b_Q|⟩_Q` by direct summation over every cube in scope.
pub fn bmo_norm(b: &BmoSymbol, scope: Scope) -> f64 {
    let grid = b.function().grid();
    let vals = b.values();
    let mut best: f64 = 0.0;
    for lattice in scope.lattices(grid) {
        let means = lattice.level_means(vals);
        for k in lattice.levels() {
            for i in 0..lattice.cubes_at(k) {
                let q = lattice.cube(k, i);
                let bq = means[k as usize][i];
                let osc: f64 = q.cells(grid).map(|c| (vals[c] - bq).abs()).sum();
                best = best.max(osc / q.cell_count() as f64);
            }
        }
    }
    best
}

/// `[e^{s b}]_{A_p}`.
pub fn exp_symbol_ap(b: &BmoSymbol, s: f64, p: f64, scope: Scope) -> Result<f64> {
    let e = b.function().map(|v| (s * v).exp());
    if e.values().iter().any(|v| !v.is_finite() || *v == 0.0) {
        return Err(Error::Numeric(format!("e^(s b) overflows at s = {s}")));
    }
    ap_constant(&Weight::new(e)?, p, scope)
}
