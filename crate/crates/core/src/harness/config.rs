use super::corpus::TestFunction;
use super::ratios::RatioKind;
use crate::error::{Error, Result};
use crate::grid::{GridSpec, Scope};
use crate::operators::KernelSpec;
use crate::weights::{SymbolKind, WeightKind};
use serde::Deserialize;
use std::collections::HashSet;
use std::path::{Path, PathBuf};
use toml::Spanned;

/// What an experiment measures.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExperimentKind {
    Ratio(RatioKind),
    /// Sharp reverse Hölder with the frozen `τ`, worst ratio against 2.
    Rhi,
    /// `Mf <= M_{L log L} f <= r' M_r f` pointwise.
    Chain,
    /// Weighted Carleson embedding with `A = A_witness`.
    Carleson,
    /// `‖B_S f‖_{L¹(w)} <= (4/η)[w]_{A_∞} ‖M_{Ψ(L)} f‖_{L¹(w)}`.
    OrliczSparse,
    /// Rubio de Francia majorant and norm bound.
    Rdf,
    /// `‖A_S g‖_{L^{p'}(σ)} <= C p' ‖Mg‖_{L^{p'}(σ)}`, `C` from the registry.
    DualSparse,
    /// `θ Σ_j (1 + N(j)) 2^{-α N(j-1) θ}` against a frozen constant.
    Summation,
    /// Shell partition, reconstruction and piece decay.
    Decomposition,
    /// Pointwise sparse domination at two resolutions.
    Domination,
}

impl ExperimentKind {
    pub fn parse(s: &str) -> Option<Self> {
        if let Some(k) = RatioKind::parse(s) {
            return Some(Self::Ratio(k));
        }
        Some(match s {
            "rhi" => Self::Rhi,
            "chain" => Self::Chain,
            "carleson" => Self::Carleson,
            "orlicz-sparse" => Self::OrliczSparse,
            "rdf" => Self::Rdf,
            "dual-sparse" => Self::DualSparse,
            "summation" => Self::Summation,
            "decomposition" => Self::Decomposition,
            "domination" => Self::Domination,
            _ => return None,
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::Ratio(k) => k.name(),
            Self::Rhi => "rhi",
            Self::Chain => "chain",
            Self::Carleson => "carleson",
            Self::OrliczSparse => "orlicz-sparse",
            Self::Rdf => "rdf",
            Self::DualSparse => "dual-sparse",
            Self::Summation => "summation",
            Self::Decomposition => "decomposition",
            Self::Domination => "domination",
        }
    }

    /// Kinds whose cases come from the seeded `(w, f, S, Ψ)` corpus.
    pub fn uses_corpus(self) -> bool {
        matches!(
            self,
            Self::Rhi | Self::Chain | Self::Carleson | Self::OrliczSparse | Self::Rdf | Self::DualSparse
        )
    }

    /// Kinds with an explicit constant, checked against a fixed bound.
    pub fn explicit(self) -> bool {
        matches!(
            self,
            Self::Rhi | Self::Chain | Self::Carleson | Self::OrliczSparse | Self::Rdf
        )
    }

    pub const NAMES: [&'static str; 20] = [
        "two-weight",
        "two-weight-commutator",
        "mixed-mw",
        "mixed-a1",
        "mixed-commutator-mw",
        "mixed-commutator-a1",
        "aq",
        "aq-commutator",
        "maximal-ap",
        "ap",
        "ap-commutator",
        "rhi",
        "chain",
        "carleson",
        "orlicz-sparse",
        "rdf",
        "dual-sparse",
        "summation",
        "decomposition",
        "domination",
    ];
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridDecl {
    pub dim: usize,
    pub lower: f64,
    pub upper: f64,
    pub log2: u32,
}

impl GridDecl {
    pub fn spec(&self) -> Result<GridSpec> {
        self.build(self.dim, self.log2)
    }

    pub fn with_log2(&self, log2: u32) -> Result<GridSpec> {
        self.build(self.dim, log2)
    }

    /// The same domain in dimension `dim` with `2^log2` cells per side.
    pub fn build(&self, dim: usize, log2: u32) -> Result<GridSpec> {
        let n = 1usize << log2;
        if dim == 1 {
            GridSpec::new_1d(self.lower, self.upper, n)
        } else {
            GridSpec::new_2d([self.lower; 2], [self.upper; 2], n)
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Tolerances {
    /// Relative stopping tolerance of the Rubio de Francia series.
    pub rdf_tol: f64,
    /// Allowed factor between domination fits at the two resolutions.
    pub stability: f64,
    /// Stopping threshold of sparse families; `None` means 2 in 1D and 4 in 2D.
    pub lambda: Option<f64>,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            rdf_tol: 1e-10,
            stability: 2.0,
            lambda: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Experiment {
    pub id: String,
    pub kind: ExperimentKind,
    pub functions: Vec<TestFunction>,
    pub weights: Vec<WeightKind>,
    pub p: Vec<f64>,
    pub r: Vec<f64>,
    pub theta: Vec<f64>,
    pub q: Vec<f64>,
    pub lambda: f64,
    /// Corpus size for the seeded kinds.
    pub cases: usize,
    pub seed: u64,
    /// Grid resolutions as powers of two; empty means the config grid.
    pub grid_log2: Vec<u32>,
    /// Dimension of the experiment's grids.
    pub dim: usize,
    pub kernels: Vec<String>,
    pub decay_alphas: Vec<f64>,
    pub j_max: u32,
    /// Whether a decomposition experiment also fits the piece-norm decay.
    pub decay_scan: bool,
    /// Registry key of the bound; the kind name unless overridden.
    pub bound: String,
}

/// A validated experiment document.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub seed: u64,
    pub scope: Scope,
    pub grid: GridDecl,
    pub kernel: String,
    pub eps_cells: f64,
    pub symbol: SymbolKind,
    pub output: PathBuf,
    pub registry: Option<PathBuf>,
    pub tolerances: Tolerances,
    pub experiments: Vec<Experiment>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGrid {
    #[serde(default = "one")]
    dim: Spanned<usize>,
    lower: Spanned<f64>,
    upper: Spanned<f64>,
    log2: Spanned<u32>,
}

fn one() -> Spanned<usize> {
    Spanned::new(0..0, 1)
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct RawOperator {
    kernel: Option<Spanned<String>>,
    eps_cells: Option<Spanned<f64>>,
    symbol: Option<Spanned<String>>,
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct RawTolerances {
    rdf_tol: Option<Spanned<f64>>,
    stability: Option<Spanned<f64>>,
    lambda: Option<Spanned<f64>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawExperiment {
    id: Spanned<String>,
    kind: Spanned<String>,
    #[serde(default)]
    functions: Vec<Spanned<String>>,
    #[serde(default)]
    weights: Vec<Spanned<String>>,
    power_alphas: Option<Spanned<Vec<f64>>>,
    p: Option<Spanned<Vec<f64>>>,
    r: Option<Spanned<Vec<f64>>>,
    theta: Option<Spanned<Vec<f64>>>,
    q: Option<Spanned<Vec<f64>>>,
    lambda: Option<Spanned<f64>>,
    cases: Option<Spanned<usize>>,
    seed: Option<u64>,
    grid_log2: Option<Spanned<Vec<u32>>>,
    dim: Option<Spanned<usize>>,
    #[serde(default)]
    kernels: Vec<Spanned<String>>,
    decay_alphas: Option<Spanned<Vec<f64>>>,
    j_max: Option<Spanned<u32>>,
    decay_scan: Option<bool>,
    bound: Option<String>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    #[serde(default)]
    seed: u64,
    scope: Option<Spanned<String>>,
    grid: Spanned<RawGrid>,
    #[serde(default)]
    operator: RawOperator,
    output: Option<String>,
    registry: Option<String>,
    #[serde(default)]
    tolerances: RawTolerances,
    #[serde(default)]
    experiment: Vec<RawExperiment>,
}

struct Diag<'a> {
    src: &'a str,
}

impl Diag<'_> {
    fn line(&self, span: std::ops::Range<usize>) -> usize {
        self.src[..span.start.min(self.src.len())].matches('\n').count() + 1
    }

    fn err<T>(&self, span: std::ops::Range<usize>, field: &str, msg: impl std::fmt::Display) -> Result<T> {
        Err(Error::Config(format!("line {}: field `{field}`: {msg}", self.line(span))))
    }
}

fn spanned_list<T: Clone>(v: &Option<Spanned<Vec<T>>>, default: &[T]) -> (Vec<T>, std::ops::Range<usize>) {
    match v {
        Some(s) => (s.get_ref().clone(), s.span()),
        None => (default.to_vec(), 0..0),
    }
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// Parses and validates; every violation names its line and field.
    pub fn parse(text: &str) -> Result<Self> {
        let raw: RawConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        let d = Diag { src: text };

        let scope = match &raw.scope {
            None => Scope::Full,
            Some(s) => match Scope::parse(s.get_ref()) {
                Some(sc) => sc,
                None => return d.err(s.span(), "scope", "expected dyadic, full or lattice:<id>"),
            },
        };

        let g = raw.grid.get_ref();
        if !matches!(*g.dim.get_ref(), 1 | 2) {
            return d.err(g.dim.span(), "grid.dim", "must be 1 or 2");
        }
        if !(g.lower.get_ref() < g.upper.get_ref()) {
            return d.err(g.upper.span(), "grid.upper", "must exceed grid.lower");
        }
        if !(1..=14).contains(g.log2.get_ref()) {
            return d.err(g.log2.span(), "grid.log2", "must lie in 1..=14");
        }
        let grid = GridDecl {
            dim: *g.dim.get_ref(),
            lower: *g.lower.get_ref(),
            upper: *g.upper.get_ref(),
            log2: *g.log2.get_ref(),
        };
        if let Err(e) = grid.spec() {
            return d.err(raw.grid.span(), "grid", e);
        }

        let kernel = match &raw.operator.kernel {
            None => "hilbert".to_string(),
            Some(k) => {
                if let Err(e) = KernelSpec::parse(k.get_ref(), grid.dim) {
                    return d.err(k.span(), "operator.kernel", e);
                }
                k.get_ref().clone()
            }
        };
        let eps_cells = match &raw.operator.eps_cells {
            None => 1.0,
            Some(e) if *e.get_ref() >= 1.0 && e.get_ref().is_finite() => *e.get_ref(),
            Some(e) => return d.err(e.span(), "operator.eps_cells", "must be >= 1"),
        };
        let symbol = match &raw.operator.symbol {
            None => SymbolKind::Linear,
            Some(s) => match SymbolKind::parse(s.get_ref()) {
                Ok(k) => k,
                Err(e) => return d.err(s.span(), "operator.symbol", e),
            },
        };

        let mut tolerances = Tolerances::default();
        let t = &raw.tolerances;
        for (slot, v, name, ok) in [
            (&mut tolerances.rdf_tol, &t.rdf_tol, "tolerances.rdf_tol", (|x: f64| x > 0.0 && x < 1.0) as fn(f64) -> bool),
            (&mut tolerances.stability, &t.stability, "tolerances.stability", |x| x >= 1.0),
        ] {
            if let Some(v) = v {
                if !ok(*v.get_ref()) || !v.get_ref().is_finite() {
                    return d.err(v.span(), name, format!("{} is out of range", v.get_ref()));
                }
                *slot = *v.get_ref();
            }
        }
        if let Some(v) = &t.lambda {
            if !(*v.get_ref() > 1.0) || !v.get_ref().is_finite() {
                return d.err(v.span(), "tolerances.lambda", format!("{} must exceed 1", v.get_ref()));
            }
            tolerances.lambda = Some(*v.get_ref());
        }

        let mut ids = HashSet::new();
        let mut experiments = Vec::new();
        for (i, e) in raw.experiment.iter().enumerate() {
            let field = |name: &str| format!("experiment[{i}].{name}");
            if e.id.get_ref().is_empty() {
                return d.err(e.id.span(), &field("id"), "must not be empty");
            }
            if !ids.insert(e.id.get_ref().clone()) {
                return d.err(e.id.span(), &field("id"), format!("duplicate id '{}'", e.id.get_ref()));
            }
            let Some(kind) = ExperimentKind::parse(e.kind.get_ref()) else {
                return d.err(
                    e.kind.span(),
                    &field("kind"),
                    format!("unknown kind '{}' (expected one of {})", e.kind.get_ref(), ExperimentKind::NAMES.join(", ")),
                );
            };
            experiments.push(validate_experiment(&d, i, e, kind, seed_default(raw.seed, i), &tolerances, &grid)?);
        }

        Ok(Self {
            seed: raw.seed,
            scope,
            grid,
            kernel,
            eps_cells,
            symbol,
            output: PathBuf::from(raw.output.unwrap_or_else(|| "reports".into())),
            registry: raw.registry.map(PathBuf::from),
            tolerances,
            experiments,
        })
    }

    pub fn grid_spec(&self) -> Result<GridSpec> {
        self.grid.spec()
    }

    pub fn kernel_spec(&self) -> Result<KernelSpec> {
        KernelSpec::parse(&self.kernel, self.grid.dim)
    }
}

fn seed_default(base: u64, i: usize) -> u64 {
    base.wrapping_add(1000 * i as u64)
}

fn validate_experiment(
    d: &Diag,
    i: usize,
    e: &RawExperiment,
    kind: ExperimentKind,
    default_seed: u64,
    tol: &Tolerances,
    grid: &GridDecl,
) -> Result<Experiment> {
    let field = |name: &str| format!("experiment[{i}].{name}");
    let mut functions = Vec::new();
    for f in &e.functions {
        match TestFunction::parse(f.get_ref()) {
            Ok(t) => functions.push(t),
            Err(err) => return d.err(f.span(), &field("functions"), err),
        }
    }
    let mut weights = Vec::new();
    for w in &e.weights {
        match WeightKind::parse(w.get_ref()) {
            Ok(k) => weights.push(k),
            Err(err) => return d.err(w.span(), &field("weights"), err),
        }
    }
    if let Some(alphas) = &e.power_alphas {
        for &a in alphas.get_ref() {
            if !(a > -(grid.dim as f64)) || !a.is_finite() {
                return d.err(alphas.span(), &field("power_alphas"), format!("{a} is not locally integrable"));
            }
            weights.push(WeightKind::Power(a));
        }
    }

    let (p, p_span) = spanned_list(&e.p, &[2.0]);
    for &v in &p {
        if !(v > 1.0) || !v.is_finite() {
            return d.err(p_span.clone(), &field("p"), format!("p = {v} must satisfy 1 < p < inf"));
        }
    }
    let (r, r_span) = spanned_list(&e.r, &[2.0]);
    for &v in &r {
        if !(v > 1.0) || !v.is_finite() {
            return d.err(r_span.clone(), &field("r"), format!("r = {v} must satisfy 1 < r < inf"));
        }
    }
    let (theta, t_span) = spanned_list(&e.theta, &[0.5]);
    for &v in &theta {
        if !(v > 0.0 && v < 1.0) {
            return d.err(t_span.clone(), &field("theta"), format!("theta = {v} must lie in (0, 1)"));
        }
    }
    let (q, q_span) = spanned_list(&e.q, &[1.5]);
    if matches!(kind, ExperimentKind::Ratio(RatioKind::Aq | RatioKind::AqCommutator)) {
        for &v in &q {
            if let Some(&pv) = p.iter().find(|&&pv| !(v >= 1.0 && v < pv)) {
                return d.err(q_span.clone(), &field("q"), format!("q = {v} must satisfy 1 <= q < p = {pv}"));
            }
        }
    }
    let cases = match &e.cases {
        None => 100,
        Some(c) if *c.get_ref() > 0 => *c.get_ref(),
        Some(c) => return d.err(c.span(), &field("cases"), "must be positive"),
    };
    let (grid_log2, g_span) = spanned_list(&e.grid_log2, &[]);
    if let Some(&bad) = grid_log2.iter().find(|&&k| !(1..=14).contains(&k)) {
        return d.err(g_span, &field("grid_log2"), format!("{bad} must lie in 1..=14"));
    }
    let dim = match &e.dim {
        None => grid.dim,
        Some(v) if matches!(*v.get_ref(), 1 | 2) => *v.get_ref(),
        Some(v) => return d.err(v.span(), &field("dim"), "must be 1 or 2"),
    };
    let lambda = match &e.lambda {
        None => tol.lambda.unwrap_or(if dim == 2 { 4.0 } else { 2.0 }),
        Some(l) if *l.get_ref() > 1.0 && l.get_ref().is_finite() => *l.get_ref(),
        Some(l) => return d.err(l.span(), &field("lambda"), "must exceed 1"),
    };
    let mut kernels = Vec::new();
    for k in &e.kernels {
        if let Err(err) = KernelSpec::parse(k.get_ref(), dim) {
            return d.err(k.span(), &field("kernels"), err);
        }
        kernels.push(k.get_ref().clone());
    }
    let (decay_alphas, a_span) = spanned_list(&e.decay_alphas, &[]);
    if let Some(&bad) = decay_alphas.iter().find(|&&a| !(a > 0.0) || !a.is_finite()) {
        return d.err(a_span, &field("decay_alphas"), format!("{bad} must be positive"));
    }
    let j_max = match &e.j_max {
        None => 6,
        Some(j) if (1..=20).contains(j.get_ref()) => *j.get_ref(),
        Some(j) => return d.err(j.span(), &field("j_max"), "must lie in 1..=20"),
    };

    let missing = |name: &str| d.err::<Experiment>(e.kind.span(), &field(name), format!("required for kind '{}'", kind.name()));
    match kind {
        ExperimentKind::Ratio(_) => {
            if functions.is_empty() {
                return missing("functions");
            }
            if weights.is_empty() {
                return missing("weights");
            }
        }
        ExperimentKind::Summation if decay_alphas.is_empty() => return missing("decay_alphas"),
        ExperimentKind::Decomposition if kernels.is_empty() => return missing("kernels"),
        ExperimentKind::Domination => {
            if functions.is_empty() {
                return missing("functions");
            }
            if grid_log2.len() != 2 {
                return d.err(e.kind.span(), &field("grid_log2"), "domination needs exactly two resolutions");
            }
        }
        _ => {}
    }

    Ok(Experiment {
        id: e.id.get_ref().clone(),
        kind,
        functions,
        weights,
        p,
        r,
        theta,
        q,
        lambda,
        cases,
        seed: e.seed.unwrap_or(default_seed),
        grid_log2,
        dim,
        kernels,
        decay_alphas,
        j_max,
        decay_scan: e.decay_scan.unwrap_or(true),
        bound: e.bound.clone().unwrap_or_else(|| kind.name().to_string()),
    })
}
