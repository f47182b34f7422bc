//! Uniform grids over bounded boxes in one or two dimensions, the sampled
//! functions living on them, and the dyadic lattices of cubes used by every
//! averaging operator in the crate.
//!
//! Cells are indexed with axis 0 fastest: `cell = i0 + res[0] * i1`.

mod io;
mod lattice;

pub use io::{read_csv, write_csv};
pub use lattice::{enumerate_cubes, Cube, DyadicLattice, Scope};

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Dimension, physical bounds and resolution of a uniform grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    dim: usize,
    lower: [f64; 2],
    upper: [f64; 2],
    res: [usize; 2],
}

impl GridSpec {
    /// One-dimensional grid of `resolution` cells over `[lower, upper]`.
    pub fn new_1d(lower: f64, upper: f64, resolution: usize) -> Result<Self> {
        Self::new(1, [lower, 0.0], [upper, 1.0], [resolution, 1])
    }

    /// Two-dimensional grid of `resolution x resolution` cells.
    pub fn new_2d(lower: [f64; 2], upper: [f64; 2], resolution: usize) -> Result<Self> {
        Self::new(2, lower, upper, [resolution, resolution])
    }

    fn new(dim: usize, lower: [f64; 2], upper: [f64; 2], res: [usize; 2]) -> Result<Self> {
        for axis in 0..dim {
            let r = res[axis];
            if r < 2 || !r.is_power_of_two() {
                return Err(Error::param(
                    "resolution",
                    r as f64,
                    "must be a power of two >= 2",
                ));
            }
            if !(upper[axis] > lower[axis]) || !lower[axis].is_finite() || !upper[axis].is_finite()
            {
                return Err(Error::Domain(format!(
                    "axis {axis}: bounds [{}, {}] are not an interval",
                    lower[axis], upper[axis]
                )));
            }
        }
        Ok(Self {
            dim,
            lower,
            upper,
            res,
        })
    }

    /// Unit-volume interval `[0, 1]`.
    pub fn unit_1d(resolution: usize) -> Result<Self> {
        Self::new_1d(0.0, 1.0, resolution)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn resolution(&self) -> usize {
        self.res[0]
    }

    pub fn res(&self) -> [usize; 2] {
        self.res
    }

    pub fn lower(&self) -> [f64; 2] {
        self.lower
    }

    pub fn upper(&self) -> [f64; 2] {
        self.upper
    }

    /// Number of cells.
    pub fn len(&self) -> usize {
        self.res[0] * self.res[1]
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Side length of a cell along `axis`.
    pub fn cell_side(&self, axis: usize) -> f64 {
        (self.upper[axis] - self.lower[axis]) / self.res[axis] as f64
    }

    pub fn cell_volume(&self) -> f64 {
        (0..self.dim).map(|a| self.cell_side(a)).product()
    }

    pub fn domain_volume(&self) -> f64 {
        (0..self.dim)
            .map(|a| self.upper[a] - self.lower[a])
            .product()
    }

    /// Number of dyadic levels above the single cell, `log2(resolution)`.
    pub fn top_level(&self) -> u32 {
        self.res[0].trailing_zeros()
    }

    pub fn coords(&self, cell: usize) -> [usize; 2] {
        [cell % self.res[0], cell / self.res[0]]
    }

    pub fn index(&self, coords: [usize; 2]) -> usize {
        coords[0] + self.res[0] * coords[1]
    }

    /// Physical center of a cell; the unused axis reports 0.
    pub fn cell_center(&self, cell: usize) -> [f64; 2] {
        let c = self.coords(cell);
        let mut x = [0.0; 2];
        for (axis, xa) in x.iter_mut().enumerate().take(self.dim) {
            *xa = self.lower[axis] + (c[axis] as f64 + 0.5) * self.cell_side(axis);
        }
        x
    }

    /// Cell reflected through the center of the domain.
    pub fn mirror(&self, cell: usize) -> usize {
        let c = self.coords(cell);
        let mut m = [0usize; 2];
        for axis in 0..self.dim {
            m[axis] = self.res[axis] - 1 - c[axis];
        }
        self.index(m)
    }

    pub(crate) fn ensure_same(&self, other: &GridSpec) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::Domain("functions live on different grids".into()))
        }
    }
}

/// Real values sampled cellwise on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledFunction {
    grid: GridSpec,
    values: Vec<f64>,
    nonnegative: bool,
}

impl SampledFunction {
    pub fn new(grid: GridSpec, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::Domain(format!(
                "{} values supplied for a grid of {} cells",
                values.len(),
                grid.len()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Numeric(format!(
                "non-finite sample {} at cell {i}",
                values[i]
            )));
        }
        Ok(Self {
            grid,
            values,
            nonnegative: false,
        })
    }

    /// Same as [`SampledFunction::new`] but also flags (and checks) nonnegativity.
    pub fn nonnegative(grid: GridSpec, values: Vec<f64>) -> Result<Self> {
        let mut f = Self::new(grid, values)?;
        if let Some(i) = f.values.iter().position(|&v| v < 0.0) {
            return Err(Error::Domain(format!(
                "negative sample {} at cell {i} in a nonnegative function",
                f.values[i]
            )));
        }
        f.nonnegative = true;
        Ok(f)
    }

    pub fn constant(grid: GridSpec, c: f64) -> Self {
        let f = Self {
            grid,
            values: vec![c; grid.len()],
            nonnegative: c >= 0.0,
        };
        f
    }

    pub fn zeros(grid: GridSpec) -> Self {
        Self::constant(grid, 0.0)
    }

    /// Samples `g` at the cell centers.
    pub fn from_fn(grid: GridSpec, g: impl Fn([f64; 2]) -> f64) -> Result<Self> {
        let values = (0..grid.len()).map(|i| g(grid.cell_center(i))).collect();
        Self::new(grid, values)
    }

    /// Internal constructor for values already known to be finite.
    pub(crate) fn from_raw(grid: GridSpec, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), grid.len());
        let nonnegative = values.iter().all(|&v| v >= 0.0);
        Self {
            grid,
            values,
            nonnegative,
        }
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn is_nonnegative(&self) -> bool {
        self.nonnegative || self.values.iter().all(|&v| v >= 0.0)
    }

    pub fn map(&self, g: impl Fn(f64) -> f64) -> Self {
        Self::from_raw(self.grid, self.values.iter().map(|&v| g(v)).collect())
    }

    pub fn abs(&self) -> Self {
        self.map(f64::abs)
    }

    pub fn scale(&self, c: f64) -> Self {
        self.map(|v| c * v)
    }

    pub fn zip_with(&self, other: &Self, g: impl Fn(f64, f64) -> f64) -> Result<Self> {
        self.grid.ensure_same(&other.grid)?;
        Ok(Self::from_raw(
            self.grid,
            self.values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| g(a, b))
                .collect(),
        ))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a * b)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// `∫ f` over the domain.
    pub fn integral(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.grid.cell_volume()
    }
}

/// Exact mean of `f` over the cells of `cube`.
pub fn average(f: &SampledFunction, cube: &Cube) -> Result<f64> {
    cube.check_within(f.grid())?;
    let sum: f64 = cube.cells(f.grid()).map(|c| f.values[c]).sum();
    Ok(sum / cube.cell_count() as f64)
}

/// `(Σ |f_i|^p w_i · cellvol)^{1/p}`, the norm of `f` in `L^p(w)`.
pub fn lp_norm(f: &SampledFunction, w: &SampledFunction, p: f64) -> Result<f64> {
    if !(p >= 1.0) || !p.is_finite() {
        return Err(Error::param("p", p, "must satisfy 1 <= p < inf"));
    }
    f.grid().ensure_same(w.grid())?;
    if !w.is_nonnegative() {
        return Err(Error::Domain("weight in lp_norm has negative samples".into()));
    }
    let sum: f64 = f
        .values()
        .iter()
        .zip(w.values())
        .map(|(&fi, &wi)| fi.abs().powf(p) * wi)
        .sum();
    Ok((sum * f.grid().cell_volume()).powf(1.0 / p))
}

/// Unweighted `L^p` norm.
pub fn lp_norm_unweighted(f: &SampledFunction, p: f64) -> Result<f64> {
    lp_norm(f, &SampledFunction::constant(*f.grid(), 1.0), p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn grid_rejects_bad_resolution() {
        assert!(GridSpec::new_1d(0.0, 1.0, 6).is_err());
        assert!(GridSpec::new_1d(0.0, 1.0, 1).is_err());
        assert!(GridSpec::new_1d(1.0, 1.0, 8).is_err());
        let g = GridSpec::new_2d([-1.0, -1.0], [1.0, 1.0], 16).unwrap();
        assert_eq!(g.len(), 256);
        assert_relative_eq!(g.cell_volume(), (2.0f64 / 16.0).powi(2));
    }

    #[test]
    fn sampled_function_validates_length_and_sign() {
        let g = GridSpec::unit_1d(4).unwrap();
        assert!(SampledFunction::new(g, vec![1.0; 3]).is_err());
        assert!(SampledFunction::nonnegative(g, vec![1.0, -1.0, 0.0, 2.0]).is_err());
        assert!(SampledFunction::nonnegative(g, vec![1.0, 1.0, 0.0, 2.0]).is_ok());
    }

    #[test]
    fn average_of_constant_and_half_indicator() {
        let g = GridSpec::unit_1d(8).unwrap();
        let lat = DyadicLattice::unshifted(g);
        let q = lat.cube(2, 0);
        let f = SampledFunction::constant(g, 3.0);
        assert_eq!(average(&f, &q).unwrap(), 3.0);
        let half = SampledFunction::new(g, vec![1.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]).unwrap();
        assert_eq!(average(&half, &q).unwrap(), 0.5);
    }

    #[test]
    fn average_rejects_foreign_cube() {
        let g = GridSpec::unit_1d(8).unwrap();
        let big = GridSpec::unit_1d(16).unwrap();
        let q = DyadicLattice::unshifted(big).cube(3, 1);
        let f = SampledFunction::constant(g, 1.0);
        assert!(matches!(average(&f, &q), Err(Error::Domain(_))));
    }

    #[test]
    fn lp_norm_examples() {
        let g = GridSpec::unit_1d(16).unwrap();
        let one = SampledFunction::constant(g, 1.0);
        for p in [1.0, 2.0, 3.5] {
            assert_relative_eq!(lp_norm(&one, &one, p).unwrap(), 1.0, epsilon = 1e-14);
        }
        let g2 = GridSpec::new_1d(-1.0, 3.0, 16).unwrap();
        let half = SampledFunction::from_fn(g2, |x| if x[0] < 1.0 { 1.0 } else { 0.0 }).unwrap();
        let w = SampledFunction::constant(g2, 1.0);
        assert_relative_eq!(
            lp_norm(&half, &w, 2.0).unwrap(),
            0.5f64.sqrt() * 4.0f64.sqrt(),
            epsilon = 1e-14
        );
        assert!(lp_norm(&half, &w, 0.5).is_err());
        assert!(lp_norm(&half, &SampledFunction::constant(g, 1.0), 2.0).is_err());
    }
}
