use proptest::prelude::*;
use wnlab::grid::{average, lp_norm, DyadicLattice, GridSpec, SampledFunction, Scope};
use wnlab::maximal::{hl_maximal, luxemburg_norm, orlicz_maximal, power_maximal, YoungFunction};
use wnlab::operators::{apply_t_omega, KernelSpec};
use wnlab::sparse::{b_psi_operator, build_sparse_family, sparse_operator, verify_sparsity};
use wnlab::weights::{a1_constant, ap_constant, fujii_wilson_constant, Weight};

fn grid(log2: u32) -> GridSpec {
    GridSpec::new_1d(-2.0, 2.0, 1 << log2).unwrap()
}

fn values(n: usize, lo: f64, hi: f64) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(lo..hi, n)
}

/// A grid of 16 or 32 cells with signed samples.
fn signed() -> impl Strategy<Value = SampledFunction> {
    (4u32..=5).prop_flat_map(|k| {
        values(1 << k, -5.0, 5.0).prop_map(move |v| SampledFunction::new(grid(k), v).unwrap())
    })
}

/// A strictly positive weight, log-uniform over four decades.
fn weight() -> impl Strategy<Value = Weight> {
    (4u32..=5).prop_flat_map(|k| {
        values(1 << k, -2.0, 2.0).prop_map(move |v| {
            let w = v.into_iter().map(|e| 10f64.powf(e)).collect();
            Weight::new(SampledFunction::nonnegative(grid(k), w).unwrap()).unwrap()
        })
    })
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1e-300)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn unshifted_levels_tile_the_grid(k in 1u32..=7, dim in 1usize..=2) {
        let g = if dim == 1 { grid(k) } else { GridSpec::new_2d([0.0; 2], [1.0; 2], 1 << k.min(5)).unwrap() };
        let lattice = DyadicLattice::unshifted(g);
        for level in lattice.levels() {
            let mut hits = vec![0u32; g.len()];
            for i in 0..lattice.cubes_at(level) {
                for c in lattice.cube(level, i).cells(&g) {
                    hits[c] += 1;
                }
            }
            prop_assert!(hits.iter().all(|&h| h == 1));
        }
    }

    #[test]
    fn averages_refine(f in signed(), id in 0usize..3) {
        let lattice = DyadicLattice::shifted(*f.grid(), id);
        for level in 1..=lattice.top_level() {
            for i in 0..lattice.cubes_at(level) {
                let q = lattice.cube(level, i);
                let (mut acc, mut vol) = (0.0, 0);
                for c in lattice.children_of(level, i) {
                    let child = lattice.cube(level - 1, c);
                    acc += average(&f, &child).unwrap() * child.cell_count() as f64;
                    vol += child.cell_count();
                }
                prop_assert_eq!(vol, q.cell_count());
                prop_assert!((average(&f, &q).unwrap() - acc / vol as f64).abs() <= 1e-12 * (1.0 + f.max_abs()));
            }
        }
    }

    #[test]
    fn lp_norm_is_homogeneous(f in signed(), c in -10.0f64..10.0, p in 1.0f64..5.0) {
        let w = SampledFunction::constant(*f.grid(), 1.5);
        let a = lp_norm(&f.scale(c), &w, p).unwrap();
        let b = c.abs() * lp_norm(&f, &w, p).unwrap();
        prop_assert!(rel(a, b) <= 1e-12 || (a - b).abs() <= 1e-300);
    }

    #[test]
    fn pointwise_chain(f in signed()) {
        let m = hl_maximal(&f, Scope::Dyadic);
        let ml = orlicz_maximal(&f, &YoungFunction::llogl1(), Scope::Dyadic).unwrap();
        for r in [1.5, 2.0, 4.0] {
            let mr = power_maximal(&f, r, Scope::Dyadic).unwrap();
            let rp = r / (r - 1.0);
            for ((a, b), c) in m.values().iter().zip(ml.values()).zip(mr.values()) {
                prop_assert!(*a <= b * (1.0 + 1e-9));
                prop_assert!(*b <= rp * c * (1.0 + 1e-9));
            }
        }
    }

    #[test]
    fn power_maximal_grows_with_r(f in signed(), r in 1.0f64..3.0, dr in 0.0f64..3.0) {
        let a = power_maximal(&f, r, Scope::Full).unwrap();
        let b = power_maximal(&f, r + dr, Scope::Full).unwrap();
        for (x, y) in a.values().iter().zip(b.values()) {
            prop_assert!(*x <= y * (1.0 + 1e-12));
        }
    }

    #[test]
    fn maximal_is_sublinear(f in signed(), seed in any::<u64>()) {
        let g = f.map(|v| (v * 1.7 + seed as f64 % 3.0).sin());
        let lhs = hl_maximal(&f.add(&g).unwrap(), Scope::Full);
        let rhs = hl_maximal(&f, Scope::Full).add(&hl_maximal(&g, Scope::Full)).unwrap();
        for (a, b) in lhs.values().iter().zip(rhs.values()) {
            prop_assert!(*a <= b + 1e-12 * b.abs().max(1.0));
        }
    }

    #[test]
    fn luxemburg_is_homogeneous(f in signed(), c in 0.01f64..100.0, spec in prop::sample::select(vec!["llogl:1", "power:2", "expl", "llogl:2"])) {
        let psi = YoungFunction::parse(spec).unwrap();
        let lattice = DyadicLattice::unshifted(*f.grid());
        let q = lattice.cube(2, 1);
        let a = luxemburg_norm(&f.scale(-c), &q, &psi).unwrap();
        let b = c * luxemburg_norm(&f, &q, &psi).unwrap();
        prop_assert!(rel(a, b) <= 1e-8);
    }

    #[test]
    fn constants_of_constant_weights_are_one(k in 2u32..=6, c in 0.01f64..100.0, p in 1.1f64..6.0) {
        let w = Weight::new(SampledFunction::constant(grid(k), c)).unwrap();
        for scope in [Scope::Dyadic, Scope::Full] {
            prop_assert!((ap_constant(&w, p, scope).unwrap() - 1.0).abs() <= 1e-12);
            prop_assert!((a1_constant(&w, scope).unwrap() - 1.0).abs() <= 1e-12);
            prop_assert!((fujii_wilson_constant(&w, scope).unwrap() - 1.0).abs() <= 1e-12);
        }
    }

    #[test]
    fn weight_constant_relations(w in weight()) {
        let a1 = a1_constant(&w, Scope::Dyadic).unwrap();
        let mut prev = f64::INFINITY;
        for p in [1.5, 2.0, 4.0] {
            let ap = ap_constant(&w, p, Scope::Dyadic).unwrap();
            prop_assert!(ap <= a1 * (1.0 + 1e-12));
            prop_assert!(ap <= prev * (1.0 + 1e-12));
            prev = ap;
        }
        prop_assert!(fujii_wilson_constant(&w, Scope::Full).unwrap() >= 1.0 - 1e-12);
    }

    #[test]
    fn constants_are_scale_invariant(w in weight(), c in 0.001f64..1000.0) {
        let v = w.scaled(c).unwrap();
        for scope in [Scope::Dyadic, Scope::Full] {
            prop_assert!(rel(ap_constant(&w, 2.0, scope).unwrap(), ap_constant(&v, 2.0, scope).unwrap()) <= 1e-10);
            prop_assert!(rel(a1_constant(&w, scope).unwrap(), a1_constant(&v, scope).unwrap()) <= 1e-10);
            prop_assert!(rel(fujii_wilson_constant(&w, scope).unwrap(), fujii_wilson_constant(&v, scope).unwrap()) <= 1e-10);
        }
    }

    #[test]
    fn truncated_integral_is_linear(f in signed(), a in -3.0f64..3.0, b in -3.0f64..3.0) {
        let k = KernelSpec::hilbert(1).unwrap();
        let g = f.map(|v| (2.0 * v).cos());
        let lhs = apply_t_omega(&f.scale(a).add(&g.scale(b)).unwrap(), &k, 1.0).unwrap();
        let rhs = apply_t_omega(&f, &k, 1.0).unwrap().scale(a)
            .add(&apply_t_omega(&g, &k, 1.0).unwrap().scale(b)).unwrap();
        let scale = 1.0 + lhs.max_abs();
        prop_assert!(lhs.sub(&rhs).unwrap().max_abs() <= 1e-12 * scale);
    }

    #[test]
    fn odd_kernel_flips_parity(f in signed(), dim in 1usize..=2) {
        let g = if dim == 1 { *f.grid() } else { GridSpec::new_2d([-1.0; 2], [1.0; 2], 16).unwrap() };
        let base = if dim == 1 { f.clone() } else {
            SampledFunction::from_fn(g, |x| (3.0 * x[0] + f.values()[0]).sin() * (x[1] * 2.0).cos() + x[1] * x[1]).unwrap()
        };
        let vals = base.values();
        let even = SampledFunction::new(g, (0..g.len()).map(|i| vals[i] + vals[g.mirror(i)]).collect()).unwrap();
        let odd = SampledFunction::new(g, (0..g.len()).map(|i| vals[i] - vals[g.mirror(i)]).collect()).unwrap();
        for spec in ["hilbert", "odd-power:3"] {
            let k = KernelSpec::parse(spec, dim).unwrap();
            let te = apply_t_omega(&even, &k, 1.0).unwrap();
            let to = apply_t_omega(&odd, &k, 1.0).unwrap();
            let tol = 1e-12 * (1.0 + te.max_abs() + to.max_abs());
            for i in 0..g.len() {
                let m = g.mirror(i);
                prop_assert!((te.values()[i] + te.values()[m]).abs() <= tol);
                prop_assert!((to.values()[i] - to.values()[m]).abs() <= tol);
            }
        }
    }

    #[test]
    fn sparse_families_are_sparse(f in signed(), id in 0usize..3, lambda in 1.5f64..8.0) {
        let s = build_sparse_family(&f, &DyadicLattice::shifted(*f.grid(), id), lambda).unwrap();
        let rep = verify_sparsity(&s);
        prop_assert!(rep.ok, "{:?}", rep);
        prop_assert!(s.eta >= 1.0 - 1.0 / lambda - 1e-12);
    }

    #[test]
    fn sparse_operator_is_monotone(f in signed(), t in prop::collection::vec(0.0f64..1.0, 32)) {
        let s = build_sparse_family(&f, &DyadicLattice::unshifted(*f.grid()), 2.0).unwrap();
        let smaller = SampledFunction::new(*f.grid(), f.values().iter().zip(&t).map(|(v, s)| v * s).collect()).unwrap();
        let a = sparse_operator(&s, &smaller).unwrap();
        let b = sparse_operator(&s, &f).unwrap();
        for (x, y) in a.values().iter().zip(b.values()) {
            prop_assert!(*x <= y * (1.0 + 1e-12) + 1e-300);
        }
    }

    #[test]
    fn identity_young_function_gives_the_sparse_operator(f in signed()) {
        let s = build_sparse_family(&f, &DyadicLattice::shifted(*f.grid(), 1), 2.0).unwrap();
        let a = b_psi_operator(&s, &f, &YoungFunction::identity()).unwrap();
        let b = sparse_operator(&s, &f).unwrap();
        prop_assert_eq!(a.values(), b.values());
    }
}
