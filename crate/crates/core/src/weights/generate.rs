use super::{BmoSymbol, Weight};
use crate::error::{Error, Result};
use crate::grid::{GridSpec, SampledFunction};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

/// Weight generators.
#[derive(Debug, Clone, PartialEq)]
pub enum WeightKind {
    Constant(f64),
    /// `|x|^α` sampled at cell centers.
    Power(f64),
    /// Piecewise constant along axis 0, one level per equal slab.
    Step(Vec<f64>),
    /// Independent `exp(σ Z)` per cell.
    LogNormal { sigma: f64, seed: u64 },
}

impl WeightKind {
    /// Parses `constant:c`, `power:α`, `step:a,b,..`, `lognormal:σ[:seed]`.
    pub fn parse(spec: &str) -> Result<Self> {
        let bad = || Error::Config(format!("bad weight spec '{spec}'"));
        let (name, arg) = spec.split_once(':').unwrap_or((spec, ""));
        let num = |s: &str| s.trim().parse::<f64>().map_err(|_| bad());
        match name.trim() {
            "constant" => Ok(Self::Constant(if arg.is_empty() { 1.0 } else { num(arg)? })),
            "power" => Ok(Self::Power(num(arg)?)),
            "step" => Ok(Self::Step(
                arg.split(',').map(num).collect::<Result<Vec<_>>>()?,
            )),
            "lognormal" => {
                let (s, seed) = arg.split_once(':').unwrap_or((arg, "0"));
                Ok(Self::LogNormal {
                    sigma: num(s)?,
                    seed: seed.trim().parse().map_err(|_| bad())?,
                })
            }
            _ => Err(bad()),
        }
    }

    pub fn label(&self) -> String {
        match self {
            Self::Constant(c) => format!("constant:{c}"),
            Self::Power(a) => format!("power:{a}"),
            Self::Step(l) => format!(
                "step:{}",
                l.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",")
            ),
            Self::LogNormal { sigma, seed } => format!("lognormal:{sigma}:{seed}"),
        }
    }
}

fn radius(x: [f64; 2], dim: usize) -> f64 {
    x[..dim].iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// Clamps from below at `1e-12 × mean` so dual averages stay finite.
fn clamp_positive(mut v: Vec<f64>) -> Vec<f64> {
    let mean = v.iter().sum::<f64>() / v.len() as f64;
    let floor = 1e-12 * mean;
    for x in &mut v {
        if *x < floor {
            *x = floor;
        }
    }
    v
}

pub fn make_weight(kind: &WeightKind, grid: &GridSpec) -> Result<Weight> {
    let dim = grid.dim();
    let values: Vec<f64> = match kind {
        WeightKind::Constant(c) => {
            if !(*c > 0.0) {
                return Err(Error::param("c", *c, "constant weight must be positive"));
            }
            vec![*c; grid.len()]
        }
        WeightKind::Power(alpha) => {
            if !(*alpha > -(dim as f64)) {
                return Err(Error::param(
                    "alpha",
                    *alpha,
                    "power weight needs alpha > -n for local integrability",
                ));
            }
            let mut v = Vec::with_capacity(grid.len());
            for cell in 0..grid.len() {
                let r = radius(grid.cell_center(cell), dim);
                if r == 0.0 {
                    return Err(Error::Domain(
                        "power weight: a cell center sits at the origin".into(),
                    ));
                }
                v.push(r.powf(*alpha));
            }
            v
        }
        WeightKind::Step(levels) => {
            if levels.is_empty() || levels.iter().any(|l| !(*l > 0.0)) {
                return Err(Error::Domain(
                    "step weight needs at least one positive level".into(),
                ));
            }
            let n = grid.res()[0];
            (0..grid.len())
                .map(|cell| {
                    let i = grid.coords(cell)[0];
                    levels[(i * levels.len() / n).min(levels.len() - 1)]
                })
                .collect()
        }
        WeightKind::LogNormal { sigma, seed } => {
            if !(*sigma > 0.0) {
                return Err(Error::param("sigma", *sigma, "must be positive"));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            let normal = Normal::new(0.0, *sigma).expect("sigma > 0");
            (0..grid.len()).map(|_| normal.sample(&mut rng).exp()).collect()
        }
    };
    Weight::new(SampledFunction::new(*grid, clamp_positive(values))?)
}

/// BMO symbol generators.
#[derive(Debug, Clone, PartialEq)]
pub enum SymbolKind {
    Constant(f64),
    /// `b(x) = x_0`.
    Linear,
    /// `b(x) = log|x|`.
    Log,
    /// `b(x) = sin(k x_0)`.
    Sine(f64),
    /// Independent `N(0, σ²)` per cell.
    Noise { sigma: f64, seed: u64 },
}

impl SymbolKind {
    /// Parses `constant:c`, `x`, `log`, `sin:k`, `noise:σ[:seed]`.
    pub fn parse(spec: &str) -> Result<Self> {
        let bad = || Error::Config(format!("bad symbol spec '{spec}'"));
        let (name, arg) = spec.split_once(':').unwrap_or((spec, ""));
        let num = |s: &str| s.trim().parse::<f64>().map_err(|_| bad());
        match name.trim() {
            "constant" => Ok(Self::Constant(if arg.is_empty() { 0.0 } else { num(arg)? })),
            "x" | "linear" => Ok(Self::Linear),
            "log" => Ok(Self::Log),
            "sin" => Ok(Self::Sine(num(arg)?)),
            "noise" => {
                let (s, seed) = arg.split_once(':').unwrap_or((arg, "0"));
                Ok(Self::Noise {
                    sigma: num(s)?,
                    seed: seed.trim().parse().map_err(|_| bad())?,
                })
            }
            _ => Err(bad()),
        }
    }
}

pub fn make_symbol(kind: &SymbolKind, grid: &GridSpec) -> Result<BmoSymbol> {
    let dim = grid.dim();
    let f = match kind {
        SymbolKind::Constant(c) => SampledFunction::constant(*grid, *c),
        SymbolKind::Linear => SampledFunction::from_fn(*grid, |x| x[0])?,
        SymbolKind::Log => {
            if (0..grid.len()).any(|c| radius(grid.cell_center(c), dim) == 0.0) {
                return Err(Error::Domain("log symbol: a cell center sits at the origin".into()));
            }
            SampledFunction::from_fn(*grid, |x| radius(x, dim).ln())?
        }
        SymbolKind::Sine(k) => SampledFunction::from_fn(*grid, |x| (k * x[0]).sin())?,
        SymbolKind::Noise { sigma, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            let normal = Normal::new(0.0, *sigma)
                .map_err(|_| Error::param("sigma", *sigma, "must be finite"))?;
            SampledFunction::new(*grid, (0..grid.len()).map(|_| normal.sample(&mut rng)).collect())?
        }
    };
    Ok(BmoSymbol::new(f))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Scope;

    #[test]
    fn generator_examples() {
        let g = GridSpec::unit_1d(8).unwrap();
        let w = make_weight(&WeightKind::Constant(5.0), &g).unwrap();
        assert!(w.values().iter().all(|&v| v == 5.0));
        assert_eq!(w.a1(Scope::Dyadic).unwrap(), 1.0);
        let g2 = GridSpec::new_1d(-1.0, 1.0, 8).unwrap();
        let p0 = make_weight(&WeightKind::Power(0.0), &g2).unwrap();
        assert!(p0.values().iter().all(|&v| v == 1.0));
        let s = make_weight(&WeightKind::Step(vec![1.0, 4.0]), &g).unwrap();
        assert_eq!(s.values(), &[1.0, 1.0, 1.0, 1.0, 4.0, 4.0, 4.0, 4.0]);
    }

    #[test]
    fn generator_errors() {
        let g = GridSpec::new_1d(-1.0, 1.0, 8).unwrap();
        assert!(make_weight(&WeightKind::Constant(0.0), &g).is_err());
        assert!(make_weight(&WeightKind::Power(-1.5), &g).is_err());
        assert!(make_weight(&WeightKind::Step(vec![]), &g).is_err());
        assert!(make_weight(&WeightKind::LogNormal { sigma: 0.0, seed: 1 }, &g).is_err());
        // an odd-centered grid puts a cell center on the origin
        let odd = GridSpec::new_1d(-1.5, 2.5, 4).unwrap();
        assert!(make_weight(&WeightKind::Power(0.5), &odd).is_err());
    }

    #[test]
    fn lognormal_is_seeded() {
        let g = GridSpec::unit_1d(64).unwrap();
        let a = make_weight(&WeightKind::LogNormal { sigma: 0.7, seed: 9 }, &g).unwrap();
        let b = make_weight(&WeightKind::LogNormal { sigma: 0.7, seed: 9 }, &g).unwrap();
        let c = make_weight(&WeightKind::LogNormal { sigma: 0.7, seed: 10 }, &g).unwrap();
        assert_eq!(a.values(), b.values());
        assert_ne!(a.values(), c.values());
    }

    #[test]
    fn spec_parsing() {
        assert_eq!(WeightKind::parse("power:-0.5").unwrap(), WeightKind::Power(-0.5));
        assert_eq!(WeightKind::parse("step:1,4").unwrap(), WeightKind::Step(vec![1.0, 4.0]));
        assert_eq!(
            WeightKind::parse("lognormal:0.5:3").unwrap(),
            WeightKind::LogNormal { sigma: 0.5, seed: 3 }
        );
        assert!(WeightKind::parse("power").is_err());
        assert!(WeightKind::parse("gaussian:1").is_err());
        assert_eq!(SymbolKind::parse("x").unwrap(), SymbolKind::Linear);
        assert_eq!(SymbolKind::parse("noise:0.5:2").unwrap(), SymbolKind::Noise { sigma: 0.5, seed: 2 });
        for k in ["constant:1", "power:0.3", "step:1,2,3", "lognormal:0.25:8"] {
            let parsed = WeightKind::parse(k).unwrap();
            assert_eq!(WeightKind::parse(&parsed.label()).unwrap(), parsed);
        }
    }
}
