use crate::grid::GridSpec;
use rayon::prelude::*;
use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

/// Convolution taps on integer cell offsets `d` with `|d_a| <= radius[a]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Taps {
    radius: [usize; 2],
    values: Vec<f64>,
}

/// How [`convolve`] evaluates the sum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ConvMethod {
    #[default]
    Auto,
    Direct,
    Fft,
}

impl Taps {
    pub fn zeros(radius: [usize; 2]) -> Self {
        let len = (2 * radius[0] + 1) * (2 * radius[1] + 1);
        Self {
            radius,
            values: vec![0.0; len],
        }
    }

    /// The identity convolution.
    pub fn delta() -> Self {
        Self {
            radius: [0, 0],
            values: vec![1.0],
        }
    }

    /// Taps `t(d)` for every offset in the box, from a closure.
    pub fn from_fn(radius: [usize; 2], mut t: impl FnMut([i64; 2]) -> f64) -> Self {
        let mut taps = Self::zeros(radius);
        for d1 in -(radius[1] as i64)..=radius[1] as i64 {
            for d0 in -(radius[0] as i64)..=radius[0] as i64 {
                let i = taps.slot([d0, d1]);
                taps.values[i] = t([d0, d1]);
            }
        }
        taps
    }

    pub fn radius(&self) -> [usize; 2] {
        self.radius
    }

    fn width(&self) -> usize {
        2 * self.radius[0] + 1
    }

    fn slot(&self, d: [i64; 2]) -> usize {
        (d[0] + self.radius[0] as i64) as usize
            + self.width() * (d[1] + self.radius[1] as i64) as usize
    }

    pub fn get(&self, d: [i64; 2]) -> f64 {
        if d[0].unsigned_abs() as usize > self.radius[0]
            || d[1].unsigned_abs() as usize > self.radius[1]
        {
            return 0.0;
        }
        self.values[self.slot(d)]
    }

    pub fn sum(&self) -> f64 {
        self.values.iter().sum()
    }

    pub fn is_delta(&self) -> bool {
        self.values.iter().enumerate().all(|(i, &v)| {
            if i == self.slot([0, 0]) {
                v == 1.0
            } else {
                v == 0.0
            }
        })
    }

    /// `t(-d)`, the taps of the adjoint convolution.
    pub fn reversed(&self) -> Self {
        let mut values = self.values.clone();
        values.reverse();
        Self {
            radius: self.radius,
            values,
        }
    }

    /// Nonzero taps as `(offset, value)`.
    pub fn nonzero(&self) -> Vec<([i64; 2], f64)> {
        let w = self.width();
        self.values
            .iter()
            .enumerate()
            .filter(|(_, &v)| v != 0.0)
            .map(|(i, &v)| {
                (
                    [
                        (i % w) as i64 - self.radius[0] as i64,
                        (i / w) as i64 - self.radius[1] as i64,
                    ],
                    v,
                )
            })
            .collect()
    }
}

/// `out(x) = Σ_d t(d) f(x - d)` with `f` extended by zero outside the grid.
pub fn convolve(grid: &GridSpec, f: &[f64], taps: &Taps, method: ConvMethod) -> Vec<f64> {
    let nz = taps.nonzero();
    let direct_cost = nz.len() as f64 * f.len() as f64;
    let use_fft = match method {
        ConvMethod::Direct => false,
        ConvMethod::Fft => true,
        ConvMethod::Auto => direct_cost > 4e6,
    };
    if use_fft {
        convolve_fft(grid, f, taps)
    } else {
        convolve_direct(grid, f, &nz)
    }
}

fn convolve_direct(grid: &GridSpec, f: &[f64], nz: &[([i64; 2], f64)]) -> Vec<f64> {
    let res = grid.res();
    (0..f.len())
        .into_par_iter()
        .map(|cell| {
            let c = grid.coords(cell);
            let mut acc = 0.0;
            for &(d, t) in nz {
                let s0 = c[0] as i64 - d[0];
                let s1 = c[1] as i64 - d[1];
                if s0 >= 0 && s1 >= 0 && (s0 as usize) < res[0] && (s1 as usize) < res[1] {
                    acc += t * f[s0 as usize + res[0] * s1 as usize];
                }
            }
            acc
        })
        .collect()
}

fn fft_axis(data: &mut [Complex<f64>], shape: [usize; 2], axis: usize, inverse: bool) {
    let n = shape[axis];
    if n == 1 {
        return;
    }
    let mut planner = FftPlanner::new();
    let fft = if inverse {
        planner.plan_fft_inverse(n)
    } else {
        planner.plan_fft_forward(n)
    };
    if axis == 0 {
        data.par_chunks_mut(n).for_each(|row| fft.process(row));
    } else {
        let mut cols: Vec<Vec<Complex<f64>>> = (0..shape[0])
            .map(|i0| (0..shape[1]).map(|i1| data[i0 + shape[0] * i1]).collect())
            .collect();
        cols.par_iter_mut().for_each(|col| fft.process(col));
        for (i0, col) in cols.iter().enumerate() {
            for (i1, v) in col.iter().enumerate() {
                data[i0 + shape[0] * i1] = *v;
            }
        }
    }
}

fn fft_2d(data: &mut [Complex<f64>], shape: [usize; 2], inverse: bool) {
    fft_axis(data, shape, 0, inverse);
    fft_axis(data, shape, 1, inverse);
}

fn convolve_fft(grid: &GridSpec, f: &[f64], taps: &Taps) -> Vec<f64> {
    let res = grid.res();
    let r = taps.radius;
    let shape = [
        (res[0] + 2 * r[0]).next_power_of_two(),
        if res[1] == 1 && r[1] == 0 {
            1
        } else {
            (res[1] + 2 * r[1]).next_power_of_two()
        },
    ];
    let total = shape[0] * shape[1];
    let mut a = vec![Complex::new(0.0, 0.0); total];
    for (cell, &v) in f.iter().enumerate() {
        let c = grid.coords(cell);
        a[c[0] + shape[0] * c[1]] = Complex::new(v, 0.0);
    }
    // shifted taps: t'(k) = t(k - r)
    let mut b = vec![Complex::new(0.0, 0.0); total];
    let w = taps.width();
    for (i, &v) in taps.values.iter().enumerate() {
        b[i % w + shape[0] * (i / w)] = Complex::new(v, 0.0);
    }
    fft_2d(&mut a, shape, false);
    fft_2d(&mut b, shape, false);
    a.par_iter_mut().zip(b.par_iter()).for_each(|(x, y)| *x *= *y);
    fft_2d(&mut a, shape, true);
    let scale = 1.0 / total as f64;
    (0..f.len())
        .map(|cell| {
            let c = grid.coords(cell);
            a[(c[0] + r[0]) + shape[0] * (c[1] + r[1])].re * scale
        })
        .collect()
}
