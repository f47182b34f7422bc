#![allow(dead_code)]

//! Brute-force oracles for the lattice-based fast paths, shared by the
//! oracle tests and the acceptance run.
//!
//! Every cube is rebuilt here by grouping cells on `floor((c - offset) / 2^k)`,
//! and every supremum is a plain loop over those cell lists. Instances are
//! seeded: 1D grids of 8 to 64 cells and 2D grids of 16 x 16.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;
use wnlab::grid::{DyadicLattice, GridSpec, SampledFunction, Scope};
use wnlab::maximal::{hl_maximal, luxemburg_norm, YoungFunction};
use wnlab::sparse::{b_psi_operator, build_sparse_family, sparse_operator, SparseFamily};
use wnlab::weights::{a1_constant, ap_constant, fujii_wilson_constant, Weight};

struct Instance {
    seed: u64,
    grid: GridSpec,
}

fn instances() -> Vec<Instance> {
    let mut out = Vec::new();
    for (i, log2) in [3u32, 4, 5, 6, 6, 5, 4, 6, 3, 6, 5, 6].into_iter().enumerate() {
        out.push(Instance {
            seed: 100 + i as u64,
            grid: GridSpec::new_1d(-1.0, 1.0, 1 << log2).unwrap(),
        });
    }
    for i in 0..10 {
        out.push(Instance {
            seed: 200 + i,
            grid: GridSpec::new_2d([-1.0; 2], [1.0; 2], 16).unwrap(),
        });
    }
    out
}

fn coords(grid: &GridSpec, cell: usize) -> [i64; 2] {
    let n = grid.res()[0];
    if grid.dim() == 1 {
        [cell as i64, 0]
    } else {
        [(cell % n) as i64, (cell / n) as i64]
    }
}

/// Offsets of the shifted lattices: a third of the side, rounded, per axis.
fn offsets(grid: &GridSpec) -> Vec<[i64; 2]> {
    let s = (grid.res()[0] as f64 / 3.0).round() as i64;
    let choices = [0, s, -s];
    match grid.dim() {
        1 => choices.iter().map(|&o| [o, 0]).collect(),
        _ => (0..9).map(|id| [choices[id % 3], choices[id / 3]]).collect(),
    }
}

/// All cubes of one lattice as cell lists, from the finest level up.
fn oracle_cubes(grid: &GridSpec, offset: [i64; 2]) -> Vec<Vec<usize>> {
    let top = grid.res()[0].trailing_zeros();
    let mut cubes = Vec::new();
    for k in 0..=top {
        let size = 1i64 << k;
        let mut groups: BTreeMap<(i64, i64), Vec<usize>> = BTreeMap::new();
        for cell in 0..grid.len() {
            let c = coords(grid, cell);
            let key = ((c[0] - offset[0]).div_euclid(size), (c[1] - offset[1]).div_euclid(size));
            groups.entry(key).or_default().push(cell);
        }
        cubes.extend(groups.into_values());
    }
    cubes
}

fn scope_cubes(grid: &GridSpec, scope: Scope) -> Vec<Vec<usize>> {
    match scope {
        Scope::Dyadic => oracle_cubes(grid, [0, 0]),
        Scope::Full => offsets(grid).into_iter().flat_map(|o| oracle_cubes(grid, o)).collect(),
        Scope::Lattice(id) => oracle_cubes(grid, offsets(grid)[id]),
    }
}

fn mean(vals: &[f64], cube: &[usize]) -> f64 {
    cube.iter().map(|&c| vals[c]).sum::<f64>() / cube.len() as f64
}

fn random_weight(rng: &mut ChaCha8Rng, grid: &GridSpec) -> Weight {
    let v = (0..grid.len()).map(|_| rng.random_range(-2.0f64..2.0).exp()).collect();
    Weight::new(SampledFunction::nonnegative(*grid, v).unwrap()).unwrap()
}

/// A signed function vanishing on a random quarter of the cells.
fn random_function(rng: &mut ChaCha8Rng, grid: &GridSpec) -> SampledFunction {
    let v = (0..grid.len())
        .map(|_| if rng.random_bool(0.25) { 0.0 } else { rng.random_range(-3.0..3.0) })
        .collect();
    SampledFunction::new(*grid, v).unwrap()
}

fn err(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1.0)
}

fn oracle_ap(w: &[f64], p: f64, cubes: &[Vec<usize>]) -> f64 {
    let dual: Vec<f64> = w.iter().map(|v| v.powf(-1.0 / (p - 1.0))).collect();
    cubes
        .iter()
        .map(|q| mean(w, q) * mean(&dual, q).powf(p - 1.0))
        .fold(0.0, f64::max)
}

fn oracle_maximal(f: &[f64], cubes: &[Vec<usize>]) -> Vec<f64> {
    let abs: Vec<f64> = f.iter().map(|v| v.abs()).collect();
    let mut out = vec![0.0f64; f.len()];
    for q in cubes {
        let m = mean(&abs, q);
        for &c in q {
            out[c] = out[c].max(m);
        }
    }
    out
}

fn oracle_a1(w: &[f64], cubes: &[Vec<usize>]) -> f64 {
    let m = oracle_maximal(w, cubes);
    m.iter().zip(w).map(|(a, b)| a / b).fold(0.0, f64::max)
}

/// `sup_Q w(Q)^{-1} Σ_{x ∈ Q} sup_{R ∋ x} ⟨w χ_Q⟩_R`, per lattice, then the max.
fn oracle_fujii_wilson(w: &[f64], grid: &GridSpec) -> f64 {
    let mut best: f64 = 0.0;
    for o in offsets(grid) {
        let cubes = oracle_cubes(grid, o);
        for q in &cubes {
            let mass: f64 = q.iter().map(|&c| w[c]).sum();
            if mass == 0.0 {
                continue;
            }
            let mut local = vec![0.0; w.len()];
            for &c in q {
                local[c] = w[c];
            }
            let m = oracle_maximal(&local, &cubes);
            best = best.max(q.iter().map(|&c| m[c]).sum::<f64>() / mass);
        }
    }
    best
}

/// Regula falsi (Illinois) on `log λ` for `⟨Ψ(|f|/λ)⟩ = 1`.
fn oracle_luxemburg(vals: &[f64], psi: &YoungFunction) -> f64 {
    let m = vals.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    if m == 0.0 {
        return 0.0;
    }
    let g = |u: f64| {
        let l = u.exp();
        vals.iter().map(|v| psi.eval(v.abs() / l)).sum::<f64>() / vals.len() as f64 - 1.0
    };
    let (mut a, mut b) = ((m * 1e-6).ln(), (m * 1e3).ln());
    let (mut fa, mut fb) = (g(a), g(b));
    assert!(fa > 0.0 && fb < 0.0);
    let mut side = 0;
    for _ in 0..500 {
        let c = (a * fb - b * fa) / (fb - fa);
        let fc = g(c);
        if fc == 0.0 || (b - a).abs() < 1e-15 {
            return c.exp();
        }
        if fc > 0.0 {
            a = c;
            fa = fc;
            if side == 1 {
                fb /= 2.0;
            }
            side = 1;
        } else {
            b = c;
            fb = fc;
            if side == -1 {
                fa /= 2.0;
            }
            side = -1;
        }
    }
    (0.5 * (a + b)).exp()
}

fn oracle_cells(grid: &GridSpec, q: &wnlab::grid::Cube) -> Vec<usize> {
    (0..grid.len())
        .filter(|&c| {
            let x = coords(grid, c);
            (0..grid.dim()).all(|a| (q.start[a] as i64..q.end[a] as i64).contains(&x[a]))
        })
        .collect()
}

fn family(inst: &Instance, f: &SampledFunction) -> SparseFamily {
    let id = inst.seed as usize % DyadicLattice::count(inst.grid.dim());
    build_sparse_family(f, &DyadicLattice::shifted(inst.grid, id), 2.0).unwrap()
}

/// Instances checked and the largest relative deviation from the oracle.
#[derive(Debug, Clone, Copy, Default)]
pub struct Agreement {
    pub instances: usize,
    pub max_err: f64,
}

impl Agreement {
    fn add(&mut self, e: f64) {
        self.max_err = self.max_err.max(e);
    }
}

pub fn check_ap() -> Agreement {
    let mut out = Agreement::default();
    for inst in instances() {
        let mut rng = ChaCha8Rng::seed_from_u64(inst.seed);
        let w = random_weight(&mut rng, &inst.grid);
        for scope in [Scope::Dyadic, Scope::Full] {
            let cubes = scope_cubes(&inst.grid, scope);
            for p in [1.5, 2.0, 3.0] {
                out.add(err(ap_constant(&w, p, scope).unwrap(), oracle_ap(w.values(), p, &cubes)));
            }
        }
        out.instances += 1;
    }
    out
}

pub fn check_a1() -> Agreement {
    let mut out = Agreement::default();
    for inst in instances() {
        let mut rng = ChaCha8Rng::seed_from_u64(inst.seed);
        let w = random_weight(&mut rng, &inst.grid);
        for scope in [Scope::Dyadic, Scope::Full] {
            let slow = oracle_a1(w.values(), &scope_cubes(&inst.grid, scope));
            out.add(err(a1_constant(&w, scope).unwrap(), slow));
        }
        out.instances += 1;
    }
    out
}

pub fn check_fujii_wilson() -> Agreement {
    let mut out = Agreement::default();
    for inst in instances() {
        let mut rng = ChaCha8Rng::seed_from_u64(inst.seed);
        let w = random_weight(&mut rng, &inst.grid);
        let fast = fujii_wilson_constant(&w, Scope::Full).unwrap();
        out.add(err(fast, oracle_fujii_wilson(w.values(), &inst.grid)));
        out.instances += 1;
    }
    out
}

pub fn check_hl_maximal() -> Agreement {
    let mut out = Agreement::default();
    for inst in instances() {
        let mut rng = ChaCha8Rng::seed_from_u64(inst.seed);
        let f = random_function(&mut rng, &inst.grid);
        for scope in [Scope::Dyadic, Scope::Full, Scope::Lattice(1)] {
            let fast = hl_maximal(&f, scope);
            let slow = oracle_maximal(f.values(), &scope_cubes(&inst.grid, scope));
            for (a, b) in fast.values().iter().zip(&slow) {
                out.add(err(*a, *b));
            }
        }
        out.instances += 1;
    }
    out
}

pub fn check_luxemburg() -> Agreement {
    let psis = ["identity", "llogl:1", "llogl:2", "power:1.5", "power:2", "expl"];
    let mut out = Agreement::default();
    for inst in instances() {
        let mut rng = ChaCha8Rng::seed_from_u64(inst.seed);
        let f = random_function(&mut rng, &inst.grid);
        let id = inst.seed as usize % DyadicLattice::count(inst.grid.dim());
        let lattice = DyadicLattice::shifted(inst.grid, id);
        for (i, q) in lattice.cubes().enumerate().filter(|(i, _)| i % 3 == 0) {
            let psi = YoungFunction::parse(psis[i % psis.len()]).unwrap();
            let vals: Vec<f64> = oracle_cells(&inst.grid, &q).iter().map(|&c| f.values()[c]).collect();
            out.add(err(luxemburg_norm(&f, &q, &psi).unwrap(), oracle_luxemburg(&vals, &psi)));
        }
        out.instances += 1;
    }
    out
}

pub fn check_sparse_operator() -> Agreement {
    let mut out = Agreement::default();
    for inst in instances() {
        let mut rng = ChaCha8Rng::seed_from_u64(inst.seed);
        let f = random_function(&mut rng, &inst.grid);
        let s = family(&inst, &f);
        assert!(!s.is_empty());
        let abs: Vec<f64> = f.values().iter().map(|v| v.abs()).collect();
        let mut slow = vec![0.0; inst.grid.len()];
        for q in &s.cubes {
            let cells = oracle_cells(&inst.grid, q);
            let m = mean(&abs, &cells);
            for c in cells {
                slow[c] += m;
            }
        }
        let fast = sparse_operator(&s, &f).unwrap();
        for (a, b) in fast.values().iter().zip(&slow) {
            out.add(err(*a, *b));
        }
        out.instances += 1;
    }
    out
}

pub fn check_b_psi() -> Agreement {
    let mut out = Agreement::default();
    for inst in instances() {
        let mut rng = ChaCha8Rng::seed_from_u64(inst.seed);
        let f = random_function(&mut rng, &inst.grid);
        let s = family(&inst, &f);
        for spec in ["llogl:1", "power:2"] {
            let psi = YoungFunction::parse(spec).unwrap();
            let mut slow = vec![0.0; inst.grid.len()];
            for q in &s.cubes {
                let cells = oracle_cells(&inst.grid, q);
                let vals: Vec<f64> = cells.iter().map(|&c| f.values()[c]).collect();
                let n = oracle_luxemburg(&vals, &psi);
                for c in cells {
                    slow[c] += n;
                }
            }
            let fast = b_psi_operator(&s, &f, &psi).unwrap();
            for (a, b) in fast.values().iter().zip(&slow) {
                out.add(err(*a, *b));
            }
        }
        out.instances += 1;
    }
    out
}

/// Every oracle comparison by name.
pub fn all_checks() -> Vec<(&'static str, Agreement)> {
    vec![
        ("ap", check_ap()),
        ("a1", check_a1()),
        ("fujii_wilson", check_fujii_wilson()),
        ("hl_maximal", check_hl_maximal()),
        ("luxemburg", check_luxemburg()),
        ("sparse_operator", check_sparse_operator()),
        ("b_psi", check_b_psi()),
    ]
}
