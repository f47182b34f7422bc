//! Rough homogeneous singular integrals on the grid.
//!
//! `T_Ω` is a truncated convolution with `Ω(y')/|y|^n`, evaluated by direct
//! summation or FFT over integer cell offsets. The Littlewood–Paley pieces
//! `T̃_j^N` split the kernel into dyadic shells `T_k` and smooth each shell at a
//! finer scale. Operator norms are estimated from below by power iteration.

mod bounds;
mod conv;
mod decomposition;
mod kernel;

pub use bounds::{
    dini_norm, piece_modulus, summation_bound, summation_j_max, summation_terms, CzBound,
};
pub use conv::{convolve, ConvMethod, Taps};
pub use decomposition::{
    commutator_decay_scan, lp_piece_apply, piece_decay_scan, reconstruction_errors,
    shell_apply, shell_range, smooth_partial_sum, DecayRow, DecayScan, DecompositionPlan,
    PieceOperator,
};
pub use kernel::{KernelSpec, ANGLES};

use crate::error::{Error, Result};
use crate::grid::{GridSpec, SampledFunction};
use crate::weights::BmoSymbol;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

/// A linear map on functions over one grid, with its `ℓ²` adjoint.
pub trait LinearOperator: Sync {
    fn grid(&self) -> &GridSpec;
    fn apply(&self, f: &SampledFunction) -> Result<SampledFunction>;
    fn apply_adjoint(&self, f: &SampledFunction) -> Result<SampledFunction>;
}

/// Convolution with fixed taps, zero extension outside the grid.
#[derive(Debug, Clone)]
pub struct ConvolutionOperator {
    grid: GridSpec,
    taps: Taps,
    reversed: Taps,
    method: ConvMethod,
}

impl ConvolutionOperator {
    pub fn new(grid: GridSpec, taps: Taps) -> Self {
        let reversed = taps.reversed();
        Self {
            grid,
            taps,
            reversed,
            method: ConvMethod::Auto,
        }
    }

    pub fn with_method(mut self, method: ConvMethod) -> Self {
        self.method = method;
        self
    }

    pub fn taps(&self) -> &Taps {
        &self.taps
    }

    fn run(&self, f: &SampledFunction, taps: &Taps) -> Result<SampledFunction> {
        self.grid.ensure_same(f.grid())?;
        let out = convolve(&self.grid, f.values(), taps, self.method);
        SampledFunction::new(self.grid, out)
    }
}

impl LinearOperator for ConvolutionOperator {
    fn grid(&self) -> &GridSpec {
        &self.grid
    }

    fn apply(&self, f: &SampledFunction) -> Result<SampledFunction> {
        self.run(f, &self.taps)
    }

    fn apply_adjoint(&self, f: &SampledFunction) -> Result<SampledFunction> {
        self.run(f, &self.reversed)
    }
}

/// The truncated operator `T_Ω` on `grid`, excluding `|y| < ε_cells · h`.
pub fn t_omega_operator(
    grid: &GridSpec,
    kernel: &KernelSpec,
    eps_cells: f64,
) -> Result<ConvolutionOperator> {
    kernel.check_grid(grid)?;
    if !(eps_cells >= 1.0) || !eps_cells.is_finite() {
        return Err(Error::param("eps_cells", eps_cells, "truncation needs eps_cells >= 1"));
    }
    let cut = eps_cells * kernel::min_side(grid);
    // a relative slack keeps offsets that sit exactly on the cut
    let taps = kernel.taps(grid, |_, r| r >= cut * (1.0 - 1e-12));
    Ok(ConvolutionOperator::new(*grid, taps))
}

/// `T_Ω f(x) = Σ_{|y| >= ε h} Ω(y')/|y|^n f(x - y) |cell|`.
pub fn apply_t_omega(
    f: &SampledFunction,
    kernel: &KernelSpec,
    eps_cells: f64,
) -> Result<SampledFunction> {
    t_omega_operator(f.grid(), kernel, eps_cells)?.apply(f)
}

/// `[b, T] f = b · T f - T(b f)` for any operator application `apply_t`.
pub fn commutator_apply(
    b: &BmoSymbol,
    apply_t: impl Fn(&SampledFunction) -> Result<SampledFunction>,
    f: &SampledFunction,
) -> Result<SampledFunction> {
    let bf = b.function().mul(f)?;
    let tf = apply_t(f)?;
    let tbf = apply_t(&bf)?;
    b.function().mul(&tf)?.sub(&tbf)
}

/// `[b, T]` as a linear operator; its adjoint is `-[b, T*]`.
pub struct Commutator<'a, T: LinearOperator> {
    pub symbol: &'a BmoSymbol,
    pub op: &'a T,
}

impl<T: LinearOperator> LinearOperator for Commutator<'_, T> {
    fn grid(&self) -> &GridSpec {
        self.op.grid()
    }

    fn apply(&self, f: &SampledFunction) -> Result<SampledFunction> {
        commutator_apply(self.symbol, |g| self.op.apply(g), f)
    }

    fn apply_adjoint(&self, f: &SampledFunction) -> Result<SampledFunction> {
        commutator_apply(self.symbol, |g| self.op.apply_adjoint(g), f).map(|g| g.scale(-1.0))
    }
}

fn l2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Lower estimate of `‖T‖_{L² → L²}` by power iteration on `T*T` from a seeded
/// Gaussian start: at most `iters` steps, stopping at relative stagnation `tol`.
pub fn operator_norm_l2(
    op: &impl LinearOperator,
    seed: u64,
    iters: usize,
    tol: f64,
) -> Result<f64> {
    let grid = *op.grid();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let start: Vec<f64> = (0..grid.len()).map(|_| StandardNormal.sample(&mut rng)).collect();
    let n0 = l2(&start);
    let mut x = SampledFunction::new(grid, start.iter().map(|v| v / n0).collect())?;
    let mut estimate = 0.0;
    for _ in 0..iters {
        let y = op.apply_adjoint(&op.apply(&x)?)?;
        let ny = l2(y.values());
        if ny == 0.0 {
            return Ok(0.0);
        }
        let next = ny.sqrt();
        let done = (next - estimate).abs() <= tol * next;
        estimate = next;
        x = y.scale(1.0 / ny);
        if done {
            break;
        }
    }
    Ok(estimate)
}

/// Lower estimate of `‖T‖_{L^p → L^p}` as the best ratio over `count` seeded
/// test functions (Gaussian noise and its partial sums).
pub fn operator_norm_lp(
    op: &impl LinearOperator,
    p: f64,
    seed: u64,
    count: usize,
) -> Result<f64> {
    if !(p >= 1.0) || !p.is_finite() {
        return Err(Error::param("p", p, "needs 1 <= p < inf"));
    }
    let grid = *op.grid();
    let norm = |v: &[f64]| v.iter().map(|x| x.abs().powf(p)).sum::<f64>().powf(1.0 / p);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best: f64 = 0.0;
    for i in 0..count {
        let mut v: Vec<f64> = (0..grid.len()).map(|_| StandardNormal.sample(&mut rng)).collect();
        // odd members are random walks, which carry low frequencies
        if i % 2 == 1 {
            for k in 1..v.len() {
                v[k] += v[k - 1];
            }
        }
        let f = SampledFunction::new(grid, v)?;
        let nf = norm(f.values());
        if nf > 0.0 {
            best = best.max(norm(op.apply(&f)?.values()) / nf);
        }
    }
    Ok(best)
}
