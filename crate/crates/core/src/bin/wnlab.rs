use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use wnlab::grid::{DyadicLattice, GridSpec, SampledFunction, Scope};
use wnlab::harness::{
    run_config, run_experiment, write_json, write_rows_csv, ExperimentConfig, ExperimentKind,
    RatioReport, Registry, SuiteContext, TestFunction, DEFAULT_CONFIG,
};
use wnlab::maximal::{MaximalKind, MaximalOperatorSpec, YoungFunction};
use wnlab::operators::{apply_t_omega, commutator_apply, KernelSpec};
use wnlab::sparse::{build_sparse_family, sparse_operator, verify_sparsity};
use wnlab::weights::{make_symbol, make_weight, rhi_check, SymbolKind, WeightKind};
use wnlab::{Error, Result};

#[derive(Parser)]
#[command(name = "wnlab", version, about = "Weighted norm inequality laboratory")]
struct Cli {
    /// Grid resolution as a power of two (2^k cells per axis).
    #[arg(long, global = true)]
    grid: Option<u32>,
    #[arg(long, global = true, value_enum)]
    scope: Option<ScopeArg>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output file, or directory for `sweep` and `verify`.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value = "csv")]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum ScopeArg {
    Dyadic,
    Full,
}

impl From<ScopeArg> for Scope {
    fn from(s: ScopeArg) -> Self {
        match s {
            ScopeArg::Dyadic => Scope::Dyadic,
            ScopeArg::Full => Scope::Full,
        }
    }
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// A_p, A_1, A_∞ and reverse Hölder data of a weight such as `power:-0.5`.
    Constants {
        weight: String,
        #[arg(long, value_delimiter = ',', default_values_t = vec![1.5, 2.0, 4.0])]
        p: Vec<f64>,
        #[arg(long, default_value_t = 1)]
        dim: usize,
    },
    /// Apply a maximal operator: `hl`, `power:r`, `iterated:k` or `orlicz:<young>`.
    Maximal {
        #[arg(long, default_value = "bump:0:1")]
        function: String,
        #[arg(long, default_value = "hl")]
        operator: String,
        #[arg(long, default_value_t = 1)]
        dim: usize,
    },
    /// Apply the truncated rough singular integral, or its commutator with `--symbol`.
    Transform {
        #[arg(long, default_value = "bump:0:1")]
        function: String,
        #[arg(long, default_value = "hilbert")]
        kernel: String,
        #[arg(long, default_value_t = 1.0)]
        eps_cells: f64,
        #[arg(long)]
        symbol: Option<String>,
        #[arg(long, default_value_t = 1)]
        dim: usize,
    },
    /// Stopping-time sparse family of a function and its sparse operator.
    Sparse {
        #[arg(long, default_value = "bump:0:1")]
        function: String,
        /// Stopping threshold; 2 in 1D and 4 in 2D when omitted.
        #[arg(long)]
        lambda: Option<f64>,
        /// Shifted lattice id; defaults to a seeded choice.
        #[arg(long)]
        lattice: Option<usize>,
        #[arg(long, default_value_t = 1)]
        dim: usize,
    },
    /// Run the shipped experiments of one kind or id (`wnlab verify list` to enumerate).
    Verify { lemma: String },
    /// Run every experiment of a TOML config.
    Sweep { config: PathBuf },
}

fn domain(dim: usize, log2: u32) -> Result<GridSpec> {
    if !(1..=14).contains(&log2) {
        return Err(Error::Config(format!("--grid {log2} must lie in 1..=14")));
    }
    match dim {
        1 => GridSpec::new_1d(-4.0, 4.0, 1 << log2),
        2 => GridSpec::new_2d([-4.0; 2], [4.0; 2], 1 << log2),
        d => Err(Error::Config(format!("--dim {d} must be 1 or 2"))),
    }
}

fn sink(out: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match out {
        Some(p) => Box::new(std::io::BufWriter::new(std::fs::File::create(p)?)),
        None => Box::new(std::io::stdout().lock()),
    })
}

fn emit<T: Serialize>(records: &[T], format: Format, out: Option<&Path>) -> Result<()> {
    let mut w = sink(out)?;
    match format {
        Format::Json => write_json(&records, &mut w)?,
        Format::Csv => {
            let mut c = csv::Writer::from_writer(&mut w);
            for r in records {
                c.serialize(r)?;
            }
            c.flush()?;
        }
    }
    w.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct Point {
    x: f64,
    y: Option<f64>,
    value: f64,
}

fn emit_function(f: &SampledFunction, format: Format, out: Option<&Path>) -> Result<()> {
    let g = f.grid();
    let points: Vec<Point> = f
        .values()
        .iter()
        .enumerate()
        .map(|(i, &value)| {
            let c = g.cell_center(i);
            Point {
                x: c[0],
                y: (g.dim() == 2).then_some(c[1]),
                value,
            }
        })
        .collect();
    emit(&points, format, out)
}

#[derive(Serialize)]
struct ConstantsRow {
    weight: String,
    scope: String,
    p: f64,
    a_p: f64,
    a_1: Option<f64>,
    a_inf: f64,
    tau: f64,
    r_w: f64,
    rhi_worst: f64,
}

fn constants(cli: &Cli, weight: &str, ps: &[f64], dim: usize) -> Result<()> {
    let scope: Scope = cli.scope.map_or(Scope::Full, Into::into);
    let grid = domain(dim, cli.grid.unwrap_or(10))?;
    let kind = WeightKind::parse(weight)?;
    let w = make_weight(&kind, &grid)?;
    let a1 = w.a1(scope).ok();
    let tau = Registry::shipped()?.get("tau")?;
    let rhi = rhi_check(&w, tau, scope)?;
    let rows = ps
        .iter()
        .map(|&p| {
            Ok(ConstantsRow {
                weight: kind.label(),
                scope: format!("{scope:?}").to_lowercase(),
                p,
                a_p: w.ap(p, scope)?,
                a_1: a1,
                a_inf: rhi.a_inf,
                tau,
                r_w: rhi.r_w,
                rhi_worst: rhi.worst_ratio,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    emit(&rows, cli.format, cli.out.as_deref())
}

fn maximal(cli: &Cli, function: &str, operator: &str, dim: usize) -> Result<()> {
    let scope: Scope = cli.scope.map_or(Scope::Full, Into::into);
    let grid = domain(dim, cli.grid.unwrap_or(10))?;
    let f = TestFunction::parse(function)?.sample(&grid)?;
    let bad = || Error::Config(format!("bad maximal operator '{operator}'"));
    let (name, arg) = operator.split_once(':').unwrap_or((operator, ""));
    let kind = match name {
        "hl" => MaximalKind::HardyLittlewood,
        "power" => MaximalKind::Power(arg.parse().map_err(|_| bad())?),
        "iterated" => MaximalKind::Iterated(arg.parse().map_err(|_| bad())?),
        "orlicz" => MaximalKind::Orlicz(YoungFunction::parse(arg)?),
        _ => return Err(bad()),
    };
    let mf = MaximalOperatorSpec::new(kind, scope)?.apply(&f)?;
    emit_function(&mf, cli.format, cli.out.as_deref())
}

fn transform(
    cli: &Cli,
    function: &str,
    kernel: &str,
    eps: f64,
    symbol: Option<&str>,
    dim: usize,
) -> Result<()> {
    let grid = domain(dim, cli.grid.unwrap_or(10))?;
    let f = TestFunction::parse(function)?.sample(&grid)?;
    let k = KernelSpec::parse(kernel, dim)?;
    let tf = match symbol {
        None => apply_t_omega(&f, &k, eps)?,
        Some(s) => {
            let b = make_symbol(&SymbolKind::parse(s)?, &grid)?;
            commutator_apply(&b, |g| apply_t_omega(g, &k, eps), &f)?
        }
    };
    emit_function(&tf, cli.format, cli.out.as_deref())
}

#[derive(Serialize)]
struct CubeRow {
    lattice: usize,
    level: u32,
    start: usize,
    end: usize,
    start_y: Option<usize>,
    end_y: Option<usize>,
    witness_fraction: f64,
}

fn sparse(cli: &Cli, function: &str, lambda: Option<f64>, lattice: Option<usize>, dim: usize) -> Result<()> {
    let lambda = lambda.unwrap_or(if dim == 2 { 4.0 } else { 2.0 });
    let grid = domain(dim, cli.grid.unwrap_or(10))?;
    let f = TestFunction::parse(function)?.sample(&grid)?;
    let count = DyadicLattice::count(dim);
    let id = lattice.unwrap_or((cli.seed.unwrap_or(1) % count as u64) as usize);
    if id >= count {
        return Err(Error::Config(format!("--lattice {id} must be below {count}")));
    }
    let family = build_sparse_family(&f, &DyadicLattice::shifted(grid, id), lambda)?;
    let report = verify_sparsity(&family);
    let a = sparse_operator(&family, &f)?;
    eprintln!(
        "{} cubes on lattice {id}, declared eta {:.4}, measured eta {:.4}, max A_S f {:.6}",
        family.cubes.len(),
        family.eta,
        report.eta_actual,
        a.max_abs()
    );
    match cli.format {
        Format::Json => {
            let mut w = sink(cli.out.as_deref())?;
            family.write_json(&mut w)?;
            w.flush()?;
            Ok(())
        }
        Format::Csv => {
            let rows: Vec<CubeRow> = family
                .cubes
                .iter()
                .zip(&family.witnesses)
                .map(|(q, e)| CubeRow {
                    lattice: q.lattice,
                    level: q.level,
                    start: q.start[0],
                    end: q.end[0],
                    start_y: (dim == 2).then_some(q.start[1]),
                    end_y: (dim == 2).then_some(q.end[1]),
                    witness_fraction: e.len() as f64 / q.cell_count() as f64,
                })
                .collect();
            emit(&rows, Format::Csv, cli.out.as_deref())
        }
    }
}

/// Applies `--grid`, `--scope` and `--seed` to a loaded config.
fn override_config(cli: &Cli, config: &mut ExperimentConfig) {
    if let Some(s) = cli.scope {
        config.scope = s.into();
    }
    if let Some(k) = cli.grid {
        config.grid.log2 = k;
        for e in &mut config.experiments {
            if e.grid_log2.len() == 1 {
                e.grid_log2 = vec![k];
            }
        }
    }
    if let Some(seed) = cli.seed {
        config.seed = seed;
        for (i, e) in config.experiments.iter_mut().enumerate() {
            e.seed = seed.wrapping_add(1000 * i as u64);
        }
    }
}

#[derive(Serialize)]
struct SummaryRow<'a> {
    id: &'a str,
    kind: &'a str,
    cases: usize,
    max_ratio: f64,
    median_ratio: f64,
    bound_key: &'a str,
    bound: Option<f64>,
    violations: usize,
    failed_checks: String,
    pass: bool,
}

fn summarize(reports: &[RatioReport], format: Format) -> Result<()> {
    let rows: Vec<SummaryRow> = reports
        .iter()
        .map(|r| SummaryRow {
            id: &r.id,
            kind: &r.kind,
            cases: r.rows.len(),
            max_ratio: r.max_ratio,
            median_ratio: r.median_ratio,
            bound_key: &r.bound_key,
            bound: r.bound,
            violations: r.violations(),
            failed_checks: r
                .checks
                .iter()
                .filter(|c| !c.pass)
                .map(|c| c.name.as_str())
                .collect::<Vec<_>>()
                .join("; "),
            pass: r.pass,
        })
        .collect();
    emit(&rows, format, None)
}

fn verify(cli: &Cli, lemma: &str) -> Result<bool> {
    let mut config = ExperimentConfig::parse(DEFAULT_CONFIG)?;
    if lemma == "list" {
        for e in &config.experiments {
            println!("{}\t{}", e.id, e.kind.name());
        }
        return Ok(true);
    }
    if ExperimentKind::parse(lemma).is_none() && !config.experiments.iter().any(|e| e.id == lemma) {
        return Err(Error::Config(format!(
            "unknown lemma '{lemma}'; known kinds: {}",
            ExperimentKind::NAMES.join(", ")
        )));
    }
    override_config(cli, &mut config);
    config.experiments.retain(|e| e.id == lemma || e.kind.name() == lemma);
    if config.experiments.is_empty() {
        return Err(Error::Config(format!("the shipped suite has no '{lemma}' experiment")));
    }
    let registry = Registry::shipped()?;
    let cx = SuiteContext {
        config: &config,
        registry: &registry,
    };
    let reports = config
        .experiments
        .iter()
        .map(|e| run_experiment(e, &cx))
        .collect::<Result<Vec<_>>>()?;
    if let Some(dir) = &cli.out {
        wnlab::harness::write_reports(dir, &reports)?;
    }
    match cli.format {
        Format::Csv => write_rows_csv(&reports, std::io::stdout().lock())?,
        Format::Json => summarize(&reports, Format::Json)?,
    }
    for r in &reports {
        eprintln!("{} {}: max ratio {:.6}", if r.pass { "PASS" } else { "FAIL" }, r.id, r.max_ratio);
    }
    Ok(reports.iter().all(|r| r.pass))
}

fn sweep(cli: &Cli, path: &Path) -> Result<bool> {
    let mut config = ExperimentConfig::load(path)?;
    override_config(cli, &mut config);
    let base = path.parent().unwrap_or(Path::new("."));
    let registry = wnlab::harness::registry_for(&config, base)?;
    let dir = cli.out.clone().unwrap_or_else(|| base.join(&config.output));
    let outcome = run_config(&config, &registry, Some(&dir))?;
    summarize(&outcome.reports, cli.format)?;
    eprintln!("reports written to {}", dir.display());
    Ok(outcome.summary.pass)
}

fn run(cli: &Cli) -> Result<bool> {
    match &cli.command {
        Command::Constants { weight, p, dim } => constants(cli, weight, p, *dim).map(|_| true),
        Command::Maximal { function, operator, dim } => {
            maximal(cli, function, operator, *dim).map(|_| true)
        }
        Command::Transform { function, kernel, eps_cells, symbol, dim } => {
            transform(cli, function, kernel, *eps_cells, symbol.as_deref(), *dim).map(|_| true)
        }
        Command::Sparse { function, lambda, lattice, dim } => {
            sparse(cli, function, *lambda, *lattice, *dim).map(|_| true)
        }
        Command::Verify { lemma } => verify(cli, lemma),
        Command::Sweep { config } => sweep(cli, config),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
