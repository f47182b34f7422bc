use super::conv::Taps;
use crate::error::{Error, Result};
use crate::grid::GridSpec;
use std::f64::consts::TAU;
use std::path::Path;

/// Number of equispaced angles on which a planar `Ω` is sampled.
pub const ANGLES: usize = 256;

#[derive(Debug, Clone, PartialEq)]
enum Omega {
    /// `(Ω(+1), Ω(-1))`.
    Line([f64; 2]),
    /// `Ω(θ_k)`, `θ_k = 2πk / ANGLES`.
    Circle(Vec<f64>),
}

/// A homogeneous kernel `K(x) = Ω(x') / |x|^n` with bounded, mean-zero `Ω`.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelSpec {
    label: String,
    omega: Omega,
}

fn odd_power_sample(m: u32, theta: f64) -> f64 {
    let c = theta.cos();
    let sign = if c.abs() < 1e-15 { 0.0 } else { c.signum() };
    sign * (m as f64 * theta).cos().abs()
}

impl KernelSpec {
    /// `Ω(±1) = ±1` on the line; on the plane `Ω(θ) = cos θ`.
    pub fn hilbert(dim: usize) -> Result<Self> {
        let mut k = Self::odd_power(dim, 1)?;
        k.label = "hilbert".into();
        Ok(k)
    }

    /// `Ω(θ) = sign(cos θ) |cos mθ|`, odd and hence mean-zero.
    pub fn odd_power(dim: usize, m: u32) -> Result<Self> {
        if m == 0 {
            return Err(Error::param("m", 0.0, "odd-power kernels need m >= 1"));
        }
        let label = format!("odd-power:{m}");
        match dim {
            1 => Self::line(label, 1.0, -1.0),
            2 => {
                // sampled on a half circle and mirrored, so Ω(-x') = -Ω(x') exactly
                let half: Vec<f64> = (0..ANGLES / 2)
                    .map(|k| odd_power_sample(m, TAU * k as f64 / ANGLES as f64))
                    .collect();
                let s = half.iter().copied().chain(half.iter().map(|v| -v)).collect();
                Self::circle(label, s)
            }
            _ => Err(Error::param("dim", dim as f64, "kernels live in dimension 1 or 2")),
        }
    }

    pub fn line(label: impl Into<String>, plus: f64, minus: f64) -> Result<Self> {
        Self::checked(label.into(), Omega::Line([plus, minus]))
    }

    /// Planar kernel from `ANGLES` equispaced samples of `Ω`.
    pub fn circle(label: impl Into<String>, samples: Vec<f64>) -> Result<Self> {
        if samples.len() != ANGLES {
            return Err(Error::Kernel(format!(
                "expected {ANGLES} angular samples, got {}",
                samples.len()
            )));
        }
        Self::checked(label.into(), Omega::Circle(samples))
    }

    fn checked(label: String, omega: Omega) -> Result<Self> {
        let k = Self { label, omega };
        let samples = k.samples();
        if samples.iter().any(|v| !v.is_finite()) {
            return Err(Error::Kernel(format!("{}: non-finite Ω sample", k.label)));
        }
        let sup = k.norm_inf();
        if sup == 0.0 {
            return Err(Error::Kernel(format!("{}: Ω vanishes identically", k.label)));
        }
        if k.mean().abs() > 1e-10 * sup {
            return Err(Error::Kernel(format!(
                "{}: Ω has mean {:e}, not zero",
                k.label,
                k.mean()
            )));
        }
        Ok(k)
    }

    /// Parses `hilbert`, `odd-power:m` and `angular-samples:<path>` (planar, one
    /// sample per line or comma separated).
    pub fn parse(spec: &str, dim: usize) -> Result<Self> {
        let (name, arg) = spec.split_once(':').unwrap_or((spec, ""));
        match name.trim() {
            "hilbert" => Self::hilbert(dim),
            "odd-power" => {
                let m = arg
                    .trim()
                    .parse()
                    .map_err(|_| Error::Config(format!("bad kernel spec '{spec}'")))?;
                Self::odd_power(dim, m)
            }
            "angular-samples" => {
                if dim != 2 {
                    return Err(Error::Config("angular-samples kernels are planar".into()));
                }
                Self::read_samples(Path::new(arg.trim()))
            }
            _ => Err(Error::Config(format!("unknown kernel '{spec}'"))),
        }
    }

    pub fn read_samples(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let samples = text
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|s| !s.is_empty())
            .map(|s| {
                s.parse::<f64>()
                    .map_err(|_| Error::Kernel(format!("{}: bad sample '{s}'", path.display())))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::circle(format!("angular-samples:{}", path.display()), samples)
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn dim(&self) -> usize {
        match self.omega {
            Omega::Line(_) => 1,
            Omega::Circle(_) => 2,
        }
    }

    pub fn samples(&self) -> Vec<f64> {
        match &self.omega {
            Omega::Line(v) => v.to_vec(),
            Omega::Circle(s) => s.clone(),
        }
    }

    /// `‖Ω‖_∞`, also the size constant `C_K`.
    pub fn norm_inf(&self) -> f64 {
        self.samples().iter().fold(0.0, |a, v| a.max(v.abs()))
    }

    /// Mean of `Ω` over the sphere; a sum of the two values on the line.
    pub fn mean(&self) -> f64 {
        match &self.omega {
            Omega::Line([a, b]) => a + b,
            Omega::Circle(s) => s.iter().sum::<f64>() / s.len() as f64,
        }
    }

    pub fn is_odd(&self) -> bool {
        match &self.omega {
            Omega::Line([a, b]) => a == &-b,
            Omega::Circle(s) => (0..ANGLES / 2).all(|k| s[k] == -s[k + ANGLES / 2]),
        }
    }

    /// `Ω(y / |y|)` for `y != 0`, linear in the angle between samples.
    pub fn omega_at(&self, y: [f64; 2]) -> f64 {
        match &self.omega {
            Omega::Line([plus, minus]) => {
                if y[0] > 0.0 {
                    *plus
                } else {
                    *minus
                }
            }
            Omega::Circle(s) => {
                let theta = y[1].atan2(y[0]).rem_euclid(TAU);
                let t = theta / TAU * ANGLES as f64;
                let i = (t.floor() as usize) % ANGLES;
                let frac = t - t.floor();
                s[i] * (1.0 - frac) + s[(i + 1) % ANGLES] * frac
            }
        }
    }

    /// `K(y) = Ω(y') / |y|^n`.
    pub fn eval(&self, y: [f64; 2]) -> f64 {
        let n = self.dim();
        let r = y[..n].iter().map(|v| v * v).sum::<f64>().sqrt();
        self.omega_at(y) / r.powi(n as i32)
    }

    pub(crate) fn check_grid(&self, grid: &GridSpec) -> Result<()> {
        if grid.dim() != self.dim() {
            return Err(Error::Kernel(format!(
                "{} is a {}-dimensional kernel, grid is {}-dimensional",
                self.label,
                self.dim(),
                grid.dim()
            )));
        }
        Ok(())
    }

    /// Quadrature taps `K(y) |cell|` over the offsets admitted by `keep`.
    pub(crate) fn taps(&self, grid: &GridSpec, keep: impl Fn([i64; 2], f64) -> bool) -> Taps {
        let res = grid.res();
        let h = [grid.cell_side(0), grid.cell_side(1)];
        let dim = grid.dim();
        let vol = grid.cell_volume();
        let odd = self.is_odd();
        let value = |d: [i64; 2]| {
            let y = [d[0] as f64 * h[0], if dim == 2 { d[1] as f64 * h[1] } else { 0.0 }];
            let r = y[..dim].iter().map(|v| v * v).sum::<f64>().sqrt();
            if keep(d, r) {
                self.eval(y) * vol
            } else {
                0.0
            }
        };
        Taps::from_fn([res[0] - 1, if dim == 2 { res[1] - 1 } else { 0 }], |d| {
            if d == [0, 0] {
                0.0
            } else if odd && (d[1] < 0 || (d[1] == 0 && d[0] < 0)) {
                // exact antisymmetry of the taps
                -value([-d[0], -d[1]])
            } else {
                value(d)
            }
        })
    }
}

/// Smallest cell side, the unit of the truncation radius.
pub(crate) fn min_side(grid: &GridSpec) -> f64 {
    (0..grid.dim())
        .map(|a| grid.cell_side(a))
        .fold(f64::INFINITY, f64::min)
}

/// Dyadic shell index `k` with `2^k <= r < 2^(k+1)`.
pub(crate) fn shell_of(r: f64) -> i32 {
    let mut k = r.log2().floor() as i32;
    if 2f64.powi(k) > r {
        k -= 1;
    }
    if 2f64.powi(k + 1) <= r {
        k += 1;
    }
    k
}
