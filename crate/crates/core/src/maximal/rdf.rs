use super::{hl_maximal, power_maximal};
use crate::error::{Error, Result};
use crate::grid::{lp_norm, SampledFunction, Scope};

/// Parameters of the Rubio de Francia iteration.
#[derive(Debug, Clone, Copy)]
pub struct RdfOptions {
    /// `‖S‖` is taken as `norm_factor * p'`.
    pub norm_factor: f64,
    /// Stop once a term's `L^p(M_r w)` norm drops below `tol * ‖h‖`.
    pub tol: f64,
    pub max_terms: usize,
    pub scope: Scope,
}

impl Default for RdfOptions {
    fn default() -> Self {
        Self {
            norm_factor: 1.0,
            tol: 1e-10,
            max_terms: 200,
            scope: Scope::Dyadic,
        }
    }
}

#[derive(Debug, Clone)]
pub struct RdfResult {
    /// `R(h)`.
    pub majorant: SampledFunction,
    /// `(M_r w)^{1/p}`.
    pub multiplier: SampledFunction,
    /// `M_r w`, the measure the norms are taken in.
    pub measure: SampledFunction,
    pub terms: usize,
    pub operator_bound: f64,
    pub h_norm: f64,
    pub majorant_norm: f64,
    /// Largest `‖S g‖ / ‖g‖` met along the iteration.
    pub max_step_ratio: f64,
}

impl RdfResult {
    /// `R(h) · (M_r w)^{1/p}`, the function whose `A_1` constant is controlled.
    pub fn a1_candidate(&self) -> SampledFunction {
        self.majorant
            .mul(&self.multiplier)
            .expect("majorant and multiplier share a grid")
    }
}

/// `R(h) = Σ_k 2^{-k} S^k h / ‖S‖^k` with `S g = M(g v) / v`, `v = (M_r w)^{1/p}`.
///
/// Since `v^p = M_r w`, `S` on `L^p(M_r w)` is conjugate to `M` on unweighted
/// `L^p`, so within one dyadic lattice Doob's inequality gives `‖S‖ <= p'`.
pub fn rubio_de_francia(
    h: &SampledFunction,
    w: &SampledFunction,
    p: f64,
    r: f64,
    opts: RdfOptions,
) -> Result<RdfResult> {
    if !(p > 1.0) || !p.is_finite() {
        return Err(Error::param("p", p, "Rubio de Francia needs 1 < p < inf"));
    }
    if !(r > 1.0) || !r.is_finite() {
        return Err(Error::param("r", r, "Rubio de Francia needs 1 < r < inf"));
    }
    if !(opts.norm_factor > 0.0) {
        return Err(Error::param("norm_factor", opts.norm_factor, "must be positive"));
    }
    h.grid().ensure_same(w.grid())?;
    if !h.is_nonnegative() || !w.is_nonnegative() {
        return Err(Error::Domain("h and w must be nonnegative".into()));
    }
    let measure = power_maximal(w, r, opts.scope)?;
    for (i, (&m, &hv)) in measure.values().iter().zip(h.values()).enumerate() {
        if m == 0.0 && hv > 0.0 {
            return Err(Error::DegenerateWeight(format!(
                "M_r w vanishes at cell {i} where h > 0"
            )));
        }
    }
    let v = measure.map(|m| m.powf(1.0 / p));
    let p_dual = p / (p - 1.0);
    let bound = opts.norm_factor * p_dual;

    let step = |g: &SampledFunction| -> Result<SampledFunction> {
        let mg = hl_maximal(&g.mul(&v)?, opts.scope);
        let vals = mg
            .values()
            .iter()
            .zip(v.values())
            .enumerate()
            .map(|(i, (&num, &den))| {
                if den > 0.0 {
                    Ok(num / den)
                } else if num == 0.0 {
                    Ok(0.0)
                } else {
                    Err(Error::DegenerateWeight(format!(
                        "S divides by (M_r w)^(1/p) = 0 at cell {i}"
                    )))
                }
            })
            .collect::<Result<Vec<f64>>>()?;
        SampledFunction::new(*g.grid(), vals)
    };

    let norm = |g: &SampledFunction| lp_norm(g, &measure, p);
    let h_norm = norm(h)?;
    let mut sum = h.clone();
    let mut term = h.clone();
    let mut terms = 1;
    let mut max_step_ratio: f64 = 0.0;
    if h_norm > 0.0 {
        loop {
            if terms >= opts.max_terms {
                return Err(Error::Numeric(format!(
                    "Rubio de Francia series did not reach tol {} in {} terms",
                    opts.tol, opts.max_terms
                )));
            }
            let sg = step(&term)?;
            let before = norm(&term)?;
            let after = norm(&sg)?;
            if before > 0.0 {
                max_step_ratio = max_step_ratio.max(after / before);
            }
            term = sg.scale(0.5 / bound);
            sum = sum.add(&term)?;
            terms += 1;
            if norm(&term)? < opts.tol * h_norm {
                break;
            }
        }
    }
    let majorant_norm = norm(&sum)?;
    Ok(RdfResult {
        majorant: sum,
        multiplier: v,
        measure,
        terms,
        operator_bound: bound,
        h_norm,
        majorant_norm,
        max_step_ratio,
    })
}
