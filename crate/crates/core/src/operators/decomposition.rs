use super::conv::{convolve, ConvMethod, Taps};
use super::kernel::{min_side, shell_of, KernelSpec};
use super::{
    operator_norm_l2, operator_norm_lp, t_omega_operator, Commutator, ConvolutionOperator,
    LinearOperator,
};
use crate::error::{Error, Result};
use crate::grid::{lp_norm_unweighted, GridSpec, SampledFunction};
use crate::weights::BmoSymbol;
use serde::Serialize;
use std::collections::BTreeMap;

/// Bump `φ`, its scales `φ_m = 2^{-mn} φ(2^{-m} ·)` and the schedule `N(j)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecompositionPlan {
    /// Support radius of `φ` at unit scale.
    pub support: f64,
    /// Last piece index.
    pub j_max: u32,
}

impl Default for DecompositionPlan {
    fn default() -> Self {
        Self {
            support: 0.01,
            j_max: 8,
        }
    }
}

fn bump(u: f64) -> f64 {
    if u < 1.0 {
        (1.0 - u * u).powi(4)
    } else {
        0.0
    }
}

impl DecompositionPlan {
    pub fn new(j_max: u32) -> Result<Self> {
        if j_max > 30 {
            return Err(Error::param("j_max", j_max as f64, "schedule 2^j overflows past 30"));
        }
        Ok(Self {
            j_max,
            ..Self::default()
        })
    }

    /// `N(j)`: 0 for `j <= 0`, `2^j` after.
    pub fn schedule(j: i64) -> i64 {
        if j <= 0 {
            0
        } else {
            1i64 << j
        }
    }

    /// Mass of the unnormalized profile `(1 - |x/h|²)^4` in dimension `n`.
    fn profile_mass(&self, dim: usize) -> f64 {
        let h = self.support;
        match dim {
            1 => 256.0 / 315.0 * h,
            _ => std::f64::consts::PI / 5.0 * h * h,
        }
    }

    /// `φ(x)` with unit integral.
    pub fn phi(&self, x: [f64; 2], dim: usize) -> f64 {
        let r = x[..dim].iter().map(|v| v * v).sum::<f64>().sqrt();
        bump(r / self.support) / self.profile_mass(dim)
    }

    /// `ψ(x) = φ(x) - 2^{-n} φ(x/2)`, whose transform is `φ̂(ξ) - φ̂(2ξ)`.
    pub fn psi(&self, x: [f64; 2], dim: usize) -> f64 {
        self.phi(x, dim) - self.phi([x[0] / 2.0, x[1] / 2.0], dim) / (1 << dim) as f64
    }

    /// Radial Simpson quadrature of `g` over `|x| <= radius`.
    fn radial_integral(g: impl Fn(f64) -> f64, radius: f64, dim: usize) -> f64 {
        let n = 4000;
        let step = radius / n as f64;
        let weight = |r: f64| match dim {
            1 => 2.0 * g(r),
            _ => 2.0 * std::f64::consts::PI * r * g(r),
        };
        let mut acc = weight(0.0) + weight(radius);
        for i in 1..n {
            acc += weight(i as f64 * step) * if i % 2 == 1 { 4.0 } else { 2.0 };
        }
        acc * step / 3.0
    }

    pub fn phi_integral(&self, dim: usize) -> f64 {
        Self::radial_integral(|r| self.phi([r, 0.0], dim), self.support, dim)
    }

    pub fn psi_integral(&self, dim: usize) -> f64 {
        Self::radial_integral(|r| self.psi([r, 0.0], dim), 2.0 * self.support, dim)
    }

    /// Physical support radius of `φ_m`.
    pub fn radius(&self, m: i64) -> f64 {
        self.support * 2f64.powi(m as i32)
    }

    /// Sampled `φ_m`, renormalized to unit sum; a delta once the support fits
    /// inside one cell.
    pub fn smoothing_taps(&self, grid: &GridSpec, m: i64) -> Result<Taps> {
        let r = self.radius(m);
        let h = [grid.cell_side(0), grid.cell_side(1)];
        if r <= min_side(grid) {
            return Ok(Taps::delta());
        }
        let dim = grid.dim();
        let mut radius = [0usize; 2];
        for a in 0..dim {
            let cells = (r / h[a]).floor();
            if cells > 4.0 * grid.res()[a] as f64 {
                return Err(Error::Resolution(format!(
                    "smoothing radius {r} exceeds the domain at scale 2^{m}"
                )));
            }
            radius[a] = cells as usize;
        }
        let raw = Taps::from_fn(radius, |d| {
            let s = (d[0] as f64 * h[0]).powi(2) + (d[1] as f64 * h[1]).powi(2);
            bump(s.sqrt() / r)
        });
        let total = raw.sum();
        Ok(Taps::from_fn(radius, |d| raw.get(d) / total))
    }
}

/// `S_m f = f * φ_m`; scales whose support spans fewer than two cells are rejected.
pub fn smooth_partial_sum(
    f: &SampledFunction,
    plan: &DecompositionPlan,
    m: i64,
) -> Result<SampledFunction> {
    let grid = f.grid();
    if plan.radius(m) <= min_side(grid) {
        return Err(Error::Resolution(format!(
            "scale 2^{m} has support radius {} below one cell",
            plan.radius(m)
        )));
    }
    let taps = plan.smoothing_taps(grid, m)?;
    SampledFunction::new(*grid, convolve(grid, f.values(), &taps, ConvMethod::Auto))
}

/// Shell indices `k` whose shells `2^k <= |y| < 2^{k+1}` meet the grid offsets.
pub fn shell_range(grid: &GridSpec) -> (i32, i32) {
    let dim = grid.dim();
    let far = (0..dim)
        .map(|a| ((grid.res()[a] - 1) as f64 * grid.cell_side(a)).powi(2))
        .sum::<f64>()
        .sqrt();
    (shell_of(min_side(grid)), shell_of(far))
}

fn shell_operator(grid: &GridSpec, kernel: &KernelSpec, k: i32) -> ConvolutionOperator {
    ConvolutionOperator::new(*grid, kernel.taps(grid, |_, r| shell_of(r) == k))
}

/// `T_k f`, the kernel restricted to the shell `2^k <= |y| < 2^{k+1}`.
pub fn shell_apply(f: &SampledFunction, kernel: &KernelSpec, k: i32) -> Result<SampledFunction> {
    kernel.check_grid(f.grid())?;
    shell_operator(f.grid(), kernel, k).apply(f)
}

/// The piece `T̃_j = Σ_k T_k (S_{k-N(j)} - S_{k-N(j-1)})`, and `Σ_k T_k S_k` for `j = 0`.
pub struct PieceOperator {
    grid: GridSpec,
    j: u32,
    /// `(T_k, S_{k-N(j)}, S_{k-N(j-1)})`, the last absent for `j = 0`.
    terms: Vec<(ConvolutionOperator, Taps, Option<Taps>)>,
}

impl PieceOperator {
    pub fn new(
        grid: &GridSpec,
        kernel: &KernelSpec,
        plan: &DecompositionPlan,
        j: u32,
    ) -> Result<Self> {
        kernel.check_grid(grid)?;
        let (lo, hi) = shell_range(grid);
        let a = DecompositionPlan::schedule(j as i64);
        let b = DecompositionPlan::schedule(j as i64 - 1);
        let mut terms = Vec::new();
        for k in lo..=hi {
            let sa = plan.smoothing_taps(grid, k as i64 - a)?;
            let sb = if j == 0 {
                None
            } else {
                let sb = plan.smoothing_taps(grid, k as i64 - b)?;
                if sb == sa {
                    continue;
                }
                Some(sb)
            };
            terms.push((shell_operator(grid, kernel, k), sa, sb));
        }
        Ok(Self {
            grid: *grid,
            j,
            terms,
        })
    }

    pub fn index(&self) -> u32 {
        self.j
    }

    /// Whether every shell cancels, so the piece is zero on this grid.
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn smooth(&self, f: &[f64], sa: &Taps, sb: &Option<Taps>) -> Vec<f64> {
        let mut g = convolve(&self.grid, f, sa, ConvMethod::Auto);
        if let Some(sb) = sb {
            let h = convolve(&self.grid, f, sb, ConvMethod::Auto);
            g.iter_mut().zip(h).for_each(|(x, y)| *x -= y);
        }
        g
    }
}

impl LinearOperator for PieceOperator {
    fn grid(&self) -> &GridSpec {
        &self.grid
    }

    fn apply(&self, f: &SampledFunction) -> Result<SampledFunction> {
        self.grid.ensure_same(f.grid())?;
        let mut out = vec![0.0; self.grid.len()];
        for (tk, sa, sb) in &self.terms {
            let g = SampledFunction::new(self.grid, self.smooth(f.values(), sa, sb))?;
            out.iter_mut()
                .zip(tk.apply(&g)?.values())
                .for_each(|(o, v)| *o += v);
        }
        SampledFunction::new(self.grid, out)
    }

    fn apply_adjoint(&self, f: &SampledFunction) -> Result<SampledFunction> {
        self.grid.ensure_same(f.grid())?;
        let mut out = vec![0.0; self.grid.len()];
        for (tk, sa, sb) in &self.terms {
            // the smoothing taps are even, hence self-adjoint
            let u = tk.apply_adjoint(f)?;
            out.iter_mut()
                .zip(self.smooth(u.values(), sa, sb))
                .for_each(|(o, v)| *o += v);
        }
        SampledFunction::new(self.grid, out)
    }
}

/// `T̃_j f`.
pub fn lp_piece_apply(
    f: &SampledFunction,
    kernel: &KernelSpec,
    plan: &DecompositionPlan,
    j: u32,
) -> Result<SampledFunction> {
    PieceOperator::new(f.grid(), kernel, plan, j)?.apply(f)
}

/// Relative `L²` error of `Σ_{j <= J} T̃_j f` against `T_Ω f` for `J = 0..=j_max`.
pub fn reconstruction_errors(
    f: &SampledFunction,
    kernel: &KernelSpec,
    plan: &DecompositionPlan,
) -> Result<Vec<(u32, f64)>> {
    let direct = t_omega_operator(f.grid(), kernel, 1.0)?.apply(f)?;
    let scale = lp_norm_unweighted(&direct, 2.0)?;
    let mut partial = SampledFunction::zeros(*f.grid());
    let mut out = Vec::new();
    for j in 0..=plan.j_max {
        partial = partial.add(&lp_piece_apply(f, kernel, plan, j)?)?;
        let err = lp_norm_unweighted(&partial.sub(&direct)?, 2.0)?;
        out.push((j, if scale > 0.0 { err / scale } else { err }));
    }
    Ok(out)
}

/// One row of a decay scan.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DecayRow {
    pub j: u32,
    pub n_j: i64,
    pub n_prev: i64,
    pub norm: f64,
}

/// Norm estimates of the pieces and the fitted decay `2^{-α N(j-1)} (1 + N(j))`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecayScan {
    pub rows: Vec<DecayRow>,
    /// `None` when fewer than two distinct `N(j-1)` carry a nonzero norm.
    pub alpha: Option<f64>,
    pub intercept: Option<f64>,
}

impl DecayScan {
    fn fit(rows: Vec<DecayRow>) -> Self {
        let top = rows.iter().fold(0.0f64, |a, r| a.max(r.norm));
        let pts: Vec<(f64, f64)> = rows
            .iter()
            .filter(|r| r.norm > 1e-12 * top)
            .map(|r| (r.n_prev as f64, (r.norm / (1.0 + r.n_j as f64)).log2()))
            .collect();
        let distinct: BTreeMap<i64, ()> = pts.iter().map(|p| (p.0 as i64, ())).collect();
        if distinct.len() < 2 {
            return Self {
                rows,
                alpha: None,
                intercept: None,
            };
        }
        let n = pts.len() as f64;
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
        let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
        let slope = sxy / sxx;
        Self {
            rows,
            alpha: Some(-slope),
            intercept: Some(my - slope * mx),
        }
    }

    /// `‖T̃_j‖ / ‖T̃_{j-1}‖` for `j >= 1`, skipping zero denominators.
    pub fn successive_ratios(&self) -> Vec<(u32, f64)> {
        self.rows
            .windows(2)
            .filter(|w| w[0].norm > 0.0)
            .map(|w| (w[1].j, w[1].norm / w[0].norm))
            .collect()
    }
}

fn estimate(op: &impl LinearOperator, p: f64, seed: u64) -> Result<f64> {
    if p == 2.0 {
        operator_norm_l2(op, seed, 50, 1e-6)
    } else {
        operator_norm_lp(op, p, seed, 64)
    }
}

/// Lower estimates of `‖T̃_j‖_{L^p}` for `j = 0..=j_max`.
pub fn piece_decay_scan(
    kernel: &KernelSpec,
    plan: &DecompositionPlan,
    p: f64,
    grid: &GridSpec,
    seed: u64,
) -> Result<DecayScan> {
    let mut rows = Vec::new();
    for j in 0..=plan.j_max {
        let op = PieceOperator::new(grid, kernel, plan, j)?;
        let norm = if op.is_zero() { 0.0 } else { estimate(&op, p, seed)? };
        rows.push(DecayRow {
            j,
            n_j: DecompositionPlan::schedule(j as i64),
            n_prev: DecompositionPlan::schedule(j as i64 - 1),
            norm,
        });
    }
    Ok(DecayScan::fit(rows))
}

/// The same scan for the commutator pieces `[b, T̃_j]`.
pub fn commutator_decay_scan(
    kernel: &KernelSpec,
    plan: &DecompositionPlan,
    b: &BmoSymbol,
    p: f64,
    grid: &GridSpec,
    seed: u64,
) -> Result<DecayScan> {
    grid.ensure_same(b.function().grid())?;
    let mut rows = Vec::new();
    for j in 0..=plan.j_max {
        let op = PieceOperator::new(grid, kernel, plan, j)?;
        let norm = if op.is_zero() {
            0.0
        } else {
            estimate(&Commutator { symbol: b, op: &op }, p, seed)?
        };
        rows.push(DecayRow {
            j,
            n_j: DecompositionPlan::schedule(j as i64),
            n_prev: DecompositionPlan::schedule(j as i64 - 1),
            norm,
        });
    }
    Ok(DecayScan::fit(rows))
}
