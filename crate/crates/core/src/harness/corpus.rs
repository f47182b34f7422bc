use crate::error::{Error, Result};
use crate::grid::{GridSpec, SampledFunction};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// Test functions declared by name in configs and used across the examples.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum TestFunction {
    /// `(1 - |x-c|²/ρ²)^2` on `|x - c| < ρ`.
    Bump { center: f64, radius: f64 },
    /// `exp(-|x-c|²/(2σ²))`.
    Gauss { center: f64, sigma: f64 },
    /// `χ_{[a, b]}` along axis 0.
    Indicator { a: f64, b: f64 },
    /// Piecewise constant along axis 0 on `[lo, hi]`, equal slabs.
    Step { lo: f64, hi: f64, levels: Vec<f64> },
    /// `sin(k x_0 + φ)` on `|x| < 1`, zero elsewhere.
    Wave { k: f64, phase: f64 },
    /// Seeded random positive levels on equal slabs of `[lo, hi]`.
    Random { lo: f64, hi: f64, pieces: usize, seed: u64 },
}

fn dist(x: [f64; 2], c: f64, dim: usize) -> f64 {
    let mut s = (x[0] - c).powi(2);
    if dim == 2 {
        s += x[1] * x[1];
    }
    s.sqrt()
}

fn slab(x: f64, lo: f64, hi: f64, n: usize) -> Option<usize> {
    if x < lo || x >= hi {
        None
    } else {
        Some((((x - lo) / (hi - lo)) * n as f64).floor().min(n as f64 - 1.0) as usize)
    }
}

impl TestFunction {
    /// `bump:c:ρ`, `gauss:c:σ`, `indicator:a:b`, `step:lo:hi:v1,v2,..`,
    /// `wave:k[:φ]`, `random:lo:hi:pieces:seed`.
    pub fn parse(spec: &str) -> Result<Self> {
        let bad = || Error::Config(format!("bad function spec '{spec}'"));
        let parts: Vec<&str> = spec.split(':').map(str::trim).collect();
        let num = |i: usize| -> Result<f64> {
            parts.get(i).and_then(|s| s.parse().ok()).ok_or_else(bad)
        };
        let f = match parts[0] {
            "bump" => Self::Bump { center: num(1)?, radius: num(2)? },
            "gauss" => Self::Gauss { center: num(1)?, sigma: num(2)? },
            "indicator" => Self::Indicator { a: num(1)?, b: num(2)? },
            "step" => Self::Step {
                lo: num(1)?,
                hi: num(2)?,
                levels: parts
                    .get(3)
                    .ok_or_else(bad)?
                    .split(',')
                    .map(|s| s.trim().parse().map_err(|_| bad()))
                    .collect::<Result<_>>()?,
            },
            "wave" => Self::Wave {
                k: num(1)?,
                phase: if parts.len() > 2 { num(2)? } else { 0.0 },
            },
            "random" => Self::Random {
                lo: num(1)?,
                hi: num(2)?,
                pieces: num(3)? as usize,
                seed: num(4)? as u64,
            },
            _ => return Err(bad()),
        };
        f.validate()?;
        Ok(f)
    }

    fn validate(&self) -> Result<()> {
        let ok = match self {
            Self::Bump { radius, .. } => *radius > 0.0,
            Self::Gauss { sigma, .. } => *sigma > 0.0,
            Self::Indicator { a, b } => a < b,
            Self::Step { lo, hi, levels } => lo < hi && !levels.is_empty(),
            Self::Wave { k, phase } => k.is_finite() && phase.is_finite(),
            Self::Random { lo, hi, pieces, .. } => lo < hi && *pieces > 0,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Config(format!("degenerate function declaration {self:?}")))
        }
    }

    pub fn label(&self) -> String {
        match self {
            Self::Bump { center, radius } => format!("bump:{center}:{radius}"),
            Self::Gauss { center, sigma } => format!("gauss:{center}:{sigma}"),
            Self::Indicator { a, b } => format!("indicator:{a}:{b}"),
            Self::Step { lo, hi, levels } => format!(
                "step:{lo}:{hi}:{}",
                levels.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",")
            ),
            Self::Wave { k, phase } => format!("wave:{k}:{phase}"),
            Self::Random { lo, hi, pieces, seed } => format!("random:{lo}:{hi}:{pieces}:{seed}"),
        }
    }

    pub fn sample(&self, grid: &GridSpec) -> Result<SampledFunction> {
        self.validate()?;
        let dim = grid.dim();
        let random_levels: Vec<f64> = match self {
            Self::Random { pieces, seed, .. } => {
                let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                (0..*pieces).map(|_| rng.random_range(0.1..2.0)).collect()
            }
            _ => Vec::new(),
        };
        SampledFunction::from_fn(*grid, |x| match self {
            Self::Bump { center, radius } => {
                let u = dist(x, *center, dim) / radius;
                if u < 1.0 {
                    (1.0 - u * u).powi(2)
                } else {
                    0.0
                }
            }
            Self::Gauss { center, sigma } => {
                (-(dist(x, *center, dim) / sigma).powi(2) / 2.0).exp()
            }
            Self::Indicator { a, b } => {
                if x[0] >= *a && x[0] <= *b {
                    1.0
                } else {
                    0.0
                }
            }
            Self::Step { lo, hi, levels } => {
                slab(x[0], *lo, *hi, levels.len()).map_or(0.0, |i| levels[i])
            }
            Self::Wave { k, phase } => {
                if dist(x, 0.0, dim) < 1.0 {
                    (k * x[0] + phase).sin()
                } else {
                    0.0
                }
            }
            Self::Random { lo, hi, pieces, .. } => {
                slab(x[0], *lo, *hi, *pieces).map_or(0.0, |i| random_levels[i])
            }
        })
    }
}

/// Ten functions used by the domination and sweep experiments.
pub fn standard_functions() -> Vec<TestFunction> {
    [
        "bump:0:1",
        "bump:0.3:0.5",
        "bump:-1.2:0.8",
        "gauss:0.5:0.4",
        "indicator:-1:1",
        "indicator:0.25:1.5",
        "step:-1:1:1,3,2",
        "step:-2:1:0.5,2",
        "wave:3:1",
        "random:-1.5:1.5:6:11",
    ]
    .iter()
    .map(|s| TestFunction::parse(s).expect("shipped function specs parse"))
    .collect()
}
