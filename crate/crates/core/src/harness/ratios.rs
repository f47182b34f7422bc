//! Inequality ratios `lhs / rhs` for the weighted bounds of rough singular
//! integrals and the maximal function.

use crate::error::{Error, Result};
use crate::grid::{lp_norm, SampledFunction, Scope};
use crate::maximal::{hl_maximal, power_maximal};
use crate::operators::{commutator_apply, t_omega_operator, KernelSpec, LinearOperator};
use crate::weights::{BmoSymbol, Weight};
use serde::{Deserialize, Serialize};

/// Shared operator settings for a family of ratios.
#[derive(Debug, Clone)]
pub struct RatioContext {
    pub kernel: KernelSpec,
    /// Truncation radius of `T_Ω` in cells.
    pub eps_cells: f64,
    /// Lattices used for maximal functions and weight constants.
    pub scope: Scope,
}

/// The inequality a row measures. Each name doubles as its registry key.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RatioKind {
    /// `‖Tf‖_{L^p(u)} / (‖Ω‖_∞ (1-θ)^{-1} (r')^{θ/p'} ‖f‖_{L^p(M_{r/θ} u)})`.
    TwoWeight,
    /// As above for `[b, T]`, with `‖b‖_BMO` and exponent `θ(1 + 1/p')`.
    TwoWeightCommutator,
    /// `[w]_{A_∞}^{1+1/p'} ‖f‖_{L^p(Mw)}`.
    MixedMw,
    /// `[w]_{A_1}^{1/p} [w]_{A_∞}^{1+1/p'} ‖f‖_{L^p(w)}`.
    MixedA1,
    MixedCommutatorMw,
    MixedCommutatorA1,
    /// `[w]_{A_q}^2 ‖f‖_{L^p(w)}`.
    Aq,
    AqCommutator,
    /// `‖Mf‖_{L^p(w)} / ([w]_{A_p}^{1/(p-1)} ‖f‖_{L^p(w)})`.
    MaximalAp,
    /// `[w]_{A_p}^{2 max(1, 1/(p-1))} ‖f‖_{L^p(w)}`.
    Ap,
    ApCommutator,
}

impl RatioKind {
    pub const ALL: [RatioKind; 11] = [
        RatioKind::TwoWeight,
        RatioKind::TwoWeightCommutator,
        RatioKind::MixedMw,
        RatioKind::MixedA1,
        RatioKind::MixedCommutatorMw,
        RatioKind::MixedCommutatorA1,
        RatioKind::Aq,
        RatioKind::AqCommutator,
        RatioKind::MaximalAp,
        RatioKind::Ap,
        RatioKind::ApCommutator,
    ];

    pub fn name(self) -> &'static str {
        match self {
            RatioKind::TwoWeight => "two-weight",
            RatioKind::TwoWeightCommutator => "two-weight-commutator",
            RatioKind::MixedMw => "mixed-mw",
            RatioKind::MixedA1 => "mixed-a1",
            RatioKind::MixedCommutatorMw => "mixed-commutator-mw",
            RatioKind::MixedCommutatorA1 => "mixed-commutator-a1",
            RatioKind::Aq => "aq",
            RatioKind::AqCommutator => "aq-commutator",
            RatioKind::MaximalAp => "maximal-ap",
            RatioKind::Ap => "ap",
            RatioKind::ApCommutator => "ap-commutator",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.name() == s)
    }

    pub fn is_commutator(self) -> bool {
        matches!(
            self,
            RatioKind::TwoWeightCommutator
                | RatioKind::MixedCommutatorMw
                | RatioKind::MixedCommutatorA1
                | RatioKind::AqCommutator
                | RatioKind::ApCommutator
        )
    }

    /// Recomputes `rhs / norm_f` from the constants stored in `row`.
    pub fn factor(self, row: &RatioRow) -> Result<f64> {
        let need = |v: Option<f64>, name: &str| {
            v.ok_or_else(|| Error::Config(format!("row {} lacks {name}", row.case)))
        };
        let p_dual = row.p / (row.p - 1.0);
        let omega = if self == RatioKind::MaximalAp {
            1.0
        } else {
            need(row.omega_inf, "omega_inf")?
        };
        let bmo = if self.is_commutator() {
            need(row.bmo, "bmo")?
        } else {
            1.0
        };
        let core = match self {
            RatioKind::TwoWeight | RatioKind::TwoWeightCommutator => {
                let (r, theta) = (need(row.r, "r")?, need(row.theta, "theta")?);
                let r_dual = r / (r - 1.0);
                let e = if self == RatioKind::TwoWeight {
                    theta / p_dual
                } else {
                    theta * (1.0 + 1.0 / p_dual)
                };
                r_dual.powf(e) / (1.0 - theta)
            }
            RatioKind::MixedMw => need(row.a_inf, "a_inf")?.powf(1.0 + 1.0 / p_dual),
            RatioKind::MixedCommutatorMw => need(row.a_inf, "a_inf")?.powf(2.0 + 1.0 / p_dual),
            RatioKind::MixedA1 => {
                need(row.a_1, "a_1")?.powf(1.0 / row.p)
                    * need(row.a_inf, "a_inf")?.powf(1.0 + 1.0 / p_dual)
            }
            RatioKind::MixedCommutatorA1 => {
                need(row.a_1, "a_1")?.powf(1.0 / row.p)
                    * need(row.a_inf, "a_inf")?.powf(2.0 + 1.0 / p_dual)
            }
            RatioKind::Aq => need(row.a_p, "a_p")?.powi(2),
            RatioKind::AqCommutator => need(row.a_p, "a_p")?.powi(3),
            RatioKind::MaximalAp => need(row.a_p, "a_p")?.powf(1.0 / (row.p - 1.0)),
            RatioKind::Ap => need(row.a_p, "a_p")?.powf(2.0 * (1.0f64).max(1.0 / (row.p - 1.0))),
            RatioKind::ApCommutator => {
                need(row.a_p, "a_p")?.powf(3.0 * (1.0f64).max(1.0 / (row.p - 1.0)))
            }
        };
        Ok(omega * bmo * core)
    }
}

/// One case of a ratio experiment. `rhs = factor · norm_f` and
/// `ratio = lhs / rhs`, all stored as computed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatioRow {
    pub experiment: String,
    pub case: usize,
    pub function: String,
    pub weight: String,
    /// Free-form case parameters, `key=value` separated by `;`.
    pub detail: String,
    pub p: f64,
    pub r: Option<f64>,
    pub theta: Option<f64>,
    /// `q` of `[w]_{A_q}`; `a_p` then holds `[w]_{A_q}`.
    pub q: Option<f64>,
    pub omega_inf: Option<f64>,
    pub bmo: Option<f64>,
    pub a_p: Option<f64>,
    pub a_1: Option<f64>,
    pub a_inf: Option<f64>,
    pub factor: f64,
    pub norm_f: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
}

impl RatioRow {
    pub(crate) fn blank(p: f64) -> Self {
        Self {
            experiment: String::new(),
            case: 0,
            function: String::new(),
            weight: String::new(),
            detail: String::new(),
            p,
            r: None,
            theta: None,
            q: None,
            omega_inf: None,
            bmo: None,
            a_p: None,
            a_1: None,
            a_inf: None,
            factor: 0.0,
            norm_f: 0.0,
            lhs: 0.0,
            rhs: 0.0,
            ratio: 0.0,
        }
    }

    pub(crate) fn finish(mut self, factor: f64, norm_f: f64, lhs: f64) -> Result<Self> {
        self.factor = factor;
        self.norm_f = norm_f;
        self.lhs = lhs;
        self.rhs = factor * norm_f;
        self.ratio = if self.rhs > 0.0 {
            lhs / self.rhs
        } else if lhs == 0.0 {
            0.0
        } else {
            return Err(Error::Numeric(format!("rhs vanishes while lhs = {lhs:e}")));
        };
        if !self.ratio.is_finite() {
            return Err(Error::Numeric(format!(
                "non-finite ratio {} = {lhs:e} / {:e}",
                self.ratio, self.rhs
            )));
        }
        Ok(self)
    }
}

fn check_p(p: f64) -> Result<()> {
    if p > 1.0 && p.is_finite() {
        Ok(())
    } else {
        Err(Error::param("p", p, "needs 1 < p < inf"))
    }
}

fn apply_t(f: &SampledFunction, ctx: &RatioContext) -> Result<SampledFunction> {
    t_omega_operator(f.grid(), &ctx.kernel, ctx.eps_cells)?.apply(f)
}

fn apply_commutator(
    f: &SampledFunction,
    b: &BmoSymbol,
    ctx: &RatioContext,
) -> Result<SampledFunction> {
    let op = t_omega_operator(f.grid(), &ctx.kernel, ctx.eps_cells)?;
    commutator_apply(b, |g| op.apply(g), f)
}

fn operator_lhs(
    f: &SampledFunction,
    w: &SampledFunction,
    b: Option<&BmoSymbol>,
    p: f64,
    ctx: &RatioContext,
) -> Result<f64> {
    let tf = match b {
        Some(b) => apply_commutator(f, b, ctx)?,
        None => apply_t(f, ctx)?,
    };
    lp_norm(&tf, w, p)
}

fn two_weight_row(
    f: &SampledFunction,
    u: &Weight,
    b: Option<&BmoSymbol>,
    p: f64,
    r: f64,
    theta: f64,
    ctx: &RatioContext,
) -> Result<RatioRow> {
    check_p(p)?;
    if !(r > 1.0) || !r.is_finite() {
        return Err(Error::param("r", r, "needs 1 < r < inf"));
    }
    if !(theta > 0.0 && theta < 1.0) {
        return Err(Error::param("theta", theta, "needs 0 < theta < 1"));
    }
    let kind = if b.is_some() {
        RatioKind::TwoWeightCommutator
    } else {
        RatioKind::TwoWeight
    };
    let mut row = RatioRow::blank(p);
    row.r = Some(r);
    row.theta = Some(theta);
    row.omega_inf = Some(ctx.kernel.norm_inf());
    row.bmo = b.map(|b| b.norm(ctx.scope));
    let m = power_maximal(u.function(), r / theta, ctx.scope)?;
    let norm_f = lp_norm(f, &m, p)?;
    let lhs = operator_lhs(f, u.function(), b, p, ctx)?;
    let factor = kind.factor(&row)?;
    row.finish(factor, norm_f, lhs)
}

/// Two-weight bound for `T_Ω` with the power maximal function `M_{r/θ} u`.
pub fn ratio_two_weight(
    f: &SampledFunction,
    u: &Weight,
    p: f64,
    r: f64,
    theta: f64,
    ctx: &RatioContext,
) -> Result<RatioRow> {
    two_weight_row(f, u, None, p, r, theta, ctx)
}

/// Two-weight bound for `[b, T_Ω]`.
pub fn ratio_two_weight_commutator(
    f: &SampledFunction,
    u: &Weight,
    b: &BmoSymbol,
    p: f64,
    r: f64,
    theta: f64,
    ctx: &RatioContext,
) -> Result<RatioRow> {
    two_weight_row(f, u, Some(b), p, r, theta, ctx)
}

/// Mixed `A_1`–`A_∞` bounds. `b` is required exactly for the commutator variants.
pub fn ratio_mixed(
    f: &SampledFunction,
    w: &Weight,
    b: Option<&BmoSymbol>,
    p: f64,
    kind: RatioKind,
    ctx: &RatioContext,
) -> Result<RatioRow> {
    check_p(p)?;
    let a1_form = match kind {
        RatioKind::MixedMw | RatioKind::MixedCommutatorMw => false,
        RatioKind::MixedA1 | RatioKind::MixedCommutatorA1 => true,
        other => {
            return Err(Error::Config(format!(
                "'{}' is not a mixed-bound variant",
                other.name()
            )))
        }
    };
    let b = symbol_for(kind, b)?;
    let mut row = RatioRow::blank(p);
    row.omega_inf = Some(ctx.kernel.norm_inf());
    row.bmo = b.map(|b| b.norm(ctx.scope));
    row.a_inf = Some(w.a_inf(ctx.scope)?);
    let norm_f = if a1_form {
        row.a_1 = Some(w.a1(ctx.scope)?);
        lp_norm(f, w.function(), p)?
    } else {
        lp_norm(f, &hl_maximal(w.function(), ctx.scope), p)?
    };
    let lhs = operator_lhs(f, w.function(), b, p, ctx)?;
    let factor = kind.factor(&row)?;
    row.finish(factor, norm_f, lhs)
}

fn symbol_for(kind: RatioKind, b: Option<&BmoSymbol>) -> Result<Option<&BmoSymbol>> {
    match (kind.is_commutator(), b) {
        (true, None) => Err(Error::Config(format!("'{}' needs a symbol", kind.name()))),
        (true, b) => Ok(b),
        (false, _) => Ok(None),
    }
}

/// `A_q` bound, `1 <= q < p`.
pub fn ratio_aq(
    f: &SampledFunction,
    w: &Weight,
    b: Option<&BmoSymbol>,
    p: f64,
    q: f64,
    ctx: &RatioContext,
) -> Result<RatioRow> {
    check_p(p)?;
    if !(q >= 1.0 && q < p) {
        return Err(Error::param("q", q, "needs 1 <= q < p"));
    }
    let kind = if b.is_some() {
        RatioKind::AqCommutator
    } else {
        RatioKind::Aq
    };
    let mut row = RatioRow::blank(p);
    row.q = Some(q);
    row.omega_inf = Some(ctx.kernel.norm_inf());
    row.bmo = b.map(|b| b.norm(ctx.scope));
    row.a_p = Some(if q == 1.0 {
        w.a1(ctx.scope)?
    } else {
        w.ap(q, ctx.scope)?
    });
    let norm_f = lp_norm(f, w.function(), p)?;
    let lhs = operator_lhs(f, w.function(), b, p, ctx)?;
    let factor = kind.factor(&row)?;
    row.finish(factor, norm_f, lhs)
}

/// MaximalAp's bound for the Hardy–Littlewood maximal function.
pub fn ratio_maximal_ap(f: &SampledFunction, w: &Weight, p: f64, scope: Scope) -> Result<RatioRow> {
    check_p(p)?;
    let mut row = RatioRow::blank(p);
    row.a_p = Some(w.ap(p, scope)?);
    let norm_f = lp_norm(f, w.function(), p)?;
    let lhs = lp_norm(&hl_maximal(f, scope), w.function(), p)?;
    let factor = RatioKind::MaximalAp.factor(&row)?;
    row.finish(factor, norm_f, lhs)
}

/// `A_p` bound for `T_Ω`, or for `[b, T_Ω]` when `b` is given.
pub fn ratio_ap(
    f: &SampledFunction,
    w: &Weight,
    b: Option<&BmoSymbol>,
    p: f64,
    ctx: &RatioContext,
) -> Result<RatioRow> {
    check_p(p)?;
    let kind = if b.is_some() {
        RatioKind::ApCommutator
    } else {
        RatioKind::Ap
    };
    let mut row = RatioRow::blank(p);
    row.omega_inf = Some(ctx.kernel.norm_inf());
    row.bmo = b.map(|b| b.norm(ctx.scope));
    row.a_p = Some(w.ap(p, ctx.scope)?);
    let norm_f = lp_norm(f, w.function(), p)?;
    let lhs = operator_lhs(f, w.function(), b, p, ctx)?;
    let factor = kind.factor(&row)?;
    row.finish(factor, norm_f, lhs)
}
