//! Acceptance run over the shipped default suite. Prints one line per
//! criterion and exits nonzero if any of them fails.

mod common;

use std::collections::BTreeMap;
use std::path::Path;
use std::time::{Duration, Instant};
use wnlab::grid::{GridSpec, SampledFunction, Scope};
use wnlab::harness::{
    run_config, run_experiment, write_reports, ExperimentConfig, RatioReport, Registry,
    SuiteContext, DEFAULT_CONFIG,
};
use wnlab::weights::{a1_constant, ap_constant, fujii_wilson_constant, Weight, WeightKind};

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict { pass, detail: detail.into() }
}

/// Reports of the default suite, keyed by id, with per-experiment wall time.
struct Run {
    reports: BTreeMap<String, (RatioReport, Duration)>,
    ordered: Vec<RatioReport>,
}

impl Run {
    fn report(&self, id: &str) -> &RatioReport {
        &self.reports[id].0
    }

    fn time(&self, ids: &[&str]) -> Duration {
        ids.iter().map(|id| self.reports[*id].1).sum()
    }
}

fn run_default(config: &ExperimentConfig, registry: &Registry) -> Run {
    let cx = SuiteContext { config, registry };
    let mut reports = BTreeMap::new();
    let mut ordered = Vec::new();
    for exp in &config.experiments {
        let start = Instant::now();
        let report = run_experiment(exp, &cx).unwrap_or_else(|e| panic!("{}: {e}", exp.id));
        reports.insert(exp.id.clone(), (report.clone(), start.elapsed()));
        ordered.push(report);
    }
    Run { reports, ordered }
}

fn failed_checks(r: &RatioReport) -> Vec<String> {
    r.checks
        .iter()
        .filter(|c| !c.pass)
        .map(|c| format!("{} = {:e} vs {:e}", c.name, c.value, c.bound))
        .collect()
}

fn unit_weight_constants() -> Verdict {
    let start = Instant::now();
    let grid = GridSpec::new_1d(-4.0, 4.0, 1 << 10).unwrap();
    let w = Weight::new(SampledFunction::constant(grid, 1.0)).unwrap();
    let mut worst = 0.0f64;
    for scope in [Scope::Dyadic, Scope::Full] {
        for p in [1.5, 2.0, 4.0] {
            worst = worst.max((ap_constant(&w, p, scope).unwrap() - 1.0).abs());
        }
        worst = worst.max((a1_constant(&w, scope).unwrap() - 1.0).abs());
        worst = worst.max((fujii_wilson_constant(&w, scope).unwrap() - 1.0).abs());
    }
    let t = start.elapsed();
    verdict(
        worst <= 1e-12 && t < Duration::from_secs(1),
        format!("max |c - 1| = {worst:e} in {t:.2?}"),
    )
}

fn oracle_equivalence() -> Verdict {
    let checks = common::all_checks();
    let bad: Vec<_> = checks
        .iter()
        .filter(|(_, a)| a.instances < 20 || !(a.max_err <= 1e-10))
        .map(|(n, a)| format!("{n} ({} instances, {:e})", a.instances, a.max_err))
        .collect();
    let worst = checks.iter().map(|(_, a)| a.max_err).fold(0.0, f64::max);
    let min_n = checks.iter().map(|(_, a)| a.instances).min().unwrap_or(0);
    if bad.is_empty() {
        verdict(true, format!("{} operators, >= {min_n} instances each, max rel err {worst:e}", checks.len()))
    } else {
        verdict(false, bad.join("; "))
    }
}

fn explicit_constants(run: &Run) -> Verdict {
    let ids = ["rhi", "chain", "carleson", "orlicz-sparse", "rdf"];
    let t = run.time(&ids);
    let mut notes = Vec::new();
    let mut pass = t < Duration::from_secs(180);
    for id in ids {
        let r = run.report(id);
        let ok = r.pass && r.violations() == 0 && r.rows.len() >= 100;
        pass &= ok;
        notes.push(format!("{id} {}x max {:.4}", r.rows.len(), r.max_ratio));
        if !ok {
            notes.extend(failed_checks(r));
        }
    }
    verdict(pass, format!("{} in {t:.1?}", notes.join(", ")))
}

fn domination(run: &Run) -> Verdict {
    let r = run.report("domination");
    let grids = ["grid=1024;", "grid=4096;"];
    let forms = ["form=T;", "form=[b,T];"];
    let covered = grids
        .iter()
        .all(|g| forms.iter().all(|f| r.rows.iter().any(|row| row.detail.contains(f) && row.detail.contains(g))));
    let mut notes = vec![format!(
        "{} fits at 2^10 and 2^12, max c {:.3} <= {:.3}",
        r.rows.len(),
        r.max_ratio,
        r.bound.unwrap_or(f64::NAN)
    )];
    notes.extend(failed_checks(r));
    verdict(r.pass && covered, notes.join("; "))
}

fn two_weight(run: &Run) -> Verdict {
    let ids = ["two-weight", "two-weight-commutator"];
    let t = run.time(&ids);
    let mut pass = t < Duration::from_secs(300);
    let mut notes = Vec::new();
    for id in ids {
        let r = run.report(id);
        let thetas: std::collections::BTreeSet<u64> =
            r.rows.iter().filter_map(|row| row.theta).map(|x| (x * 10.0).round() as u64).collect();
        let alphas: std::collections::BTreeSet<&str> = r.rows.iter().map(|row| row.weight.as_str()).collect();
        let ok = r.pass && thetas == (1..=9).collect() && alphas.len() == 13 && r.rows.iter().all(|x| x.p == 2.0 && x.r == Some(2.0));
        pass &= ok;
        notes.push(format!("{id} max {:.3} <= {:.3}", r.max_ratio, r.bound.unwrap_or(f64::NAN)));
    }
    verdict(pass, format!("{} in {t:.1?}", notes.join(", ")))
}

fn mixed(run: &Run) -> Verdict {
    let edge = WeightKind::Power(-0.9).label();
    let mut pass = true;
    let mut notes = Vec::new();
    for id in ["mixed-mw", "mixed-a1", "mixed-commutator-mw", "mixed-commutator-a1"] {
        let r = run.report(id);
        let has_edge = r.rows.iter().any(|row| row.weight == edge);
        let finite = r.rows.iter().all(|row| row.ratio.is_finite());
        pass &= r.pass && has_edge && finite;
        notes.push(format!("{id} max {:.3} <= {:.3}", r.max_ratio, r.bound.unwrap_or(f64::NAN)));
    }
    verdict(pass, notes.join(", "))
}

/// `Σ_j (1 + N(j)) 2^{-α N(j-1) θ}` summed until the terms underflow.
fn direct_sum(alpha: f64, theta: f64) -> f64 {
    let n = |j: i64| if j <= 0 { 0.0 } else { (j as f64).exp2() };
    let mut sum = 0.0;
    for j in 0..=62 {
        let term = (1.0 + n(j)) * (-alpha * n(j - 1) * theta).exp2();
        sum += term;
        if j > 1 && term < 1e-18 * sum {
            break;
        }
    }
    sum
}

fn summation(run: &Run) -> Verdict {
    let r = run.report("summation");
    let t = run.time(&["summation"]);
    let mut worst = 0.0f64;
    for row in &r.rows {
        let theta = row.theta.unwrap();
        let alpha: f64 = row.detail.split(';').find_map(|kv| kv.strip_prefix("alpha=")).unwrap().parse().unwrap();
        let direct = theta * direct_sum(alpha, theta);
        worst = worst.max((row.lhs - direct).abs() / direct);
    }
    let expected = 99 * 3;
    verdict(
        r.pass && worst <= 1e-12 && r.rows.len() == expected && t < Duration::from_secs(1),
        format!(
            "max {:.3} <= {:.3}, oracle rel err {worst:e}, {} rows in {t:.2?}",
            r.max_ratio,
            r.bound.unwrap_or(f64::NAN),
            r.rows.len()
        ),
    )
}

fn decomposition(run: &Run) -> Verdict {
    let mut pass = true;
    let mut notes = Vec::new();
    for id in ["decomposition-1d", "decomposition-2d"] {
        let r = run.report(id);
        let needed = ["shell partition", "reconstruction increases", "reconstruction error at J = 6"];
        let present = needed.iter().all(|n| r.checks.iter().filter(|c| c.name.ends_with(n)).count() == 2);
        pass &= r.pass && present;
        notes.extend(failed_checks(r));
    }
    let decay: Vec<_> = run
        .report("decomposition-1d")
        .checks
        .iter()
        .filter(|c| c.name.ends_with("fitted decay alpha"))
        .collect();
    pass &= decay.len() == 2;
    for c in &decay {
        notes.push(format!("{} = {:.3}", c.name, c.value));
    }
    verdict(pass, notes.join(", "))
}

fn reproducible(config: &ExperimentConfig, registry: &Registry, first: &Run) -> Verdict {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    write_reports(&a, &first.ordered).unwrap();
    run_config(config, registry, Some(&b)).unwrap();
    let read = |d: &Path, f: &str| std::fs::read(d.join(f)).unwrap();
    let same: Vec<_> = ["rows.csv", "reports.json", "summary.json"]
        .into_iter()
        .map(|f| (f, read(&a, f) == read(&b, f)))
        .collect();
    let bytes = read(&a, "rows.csv").len();
    verdict(
        same.iter().all(|(_, s)| *s),
        format!(
            "rows.csv {bytes} bytes; {}",
            same.iter().map(|(f, s)| format!("{f} {}", if *s { "identical" } else { "differs" })).collect::<Vec<_>>().join(", ")
        ),
    )
}

fn main() {
    let config = ExperimentConfig::parse(DEFAULT_CONFIG).unwrap();
    let registry = Registry::shipped().unwrap();
    let run = run_default(&config, &registry);
    let verdicts = [
        unit_weight_constants(),
        oracle_equivalence(),
        explicit_constants(&run),
        domination(&run),
        two_weight(&run),
        mixed(&run),
        summation(&run),
        decomposition(&run),
        reproducible(&config, &registry, &run),
    ];
    let mut failures = 0;
    for (i, v) in verdicts.iter().enumerate() {
        println!("criterion {}: {} {}", i + 1, if v.pass { "PASS" } else { "FAIL" }, v.detail);
        failures += usize::from(!v.pass);
    }
    if failures > 0 {
        println!("{failures} criteria failed");
        std::process::exit(1);
    }
}
