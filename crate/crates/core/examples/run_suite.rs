//! Runs a TOML experiment config and prints the per-experiment summary.
//!
//! `cargo run --release --example run_suite -- [config] [out-dir]`

use std::path::PathBuf;
use wnlab::harness::run_suite;

fn main() -> wnlab::Result<()> {
    let mut args = std::env::args().skip(1);
    let config = args
        .next()
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("configs/default.toml"));
    let out = args.next().map(PathBuf::from);
    let outcome = run_suite(&config, out.as_deref())?;
    for e in &outcome.summary.experiments {
        let bound = e.bound.map_or("-".to_string(), |b| format!("{b:.4}"));
        println!(
            "{:<4} {:<24} {:>5} cases  max {:>10.4}  bound {bound:>8}",
            if e.pass { "ok" } else { "FAIL" },
            e.id,
            e.cases,
            e.max_ratio
        );
    }
    std::process::exit(outcome.exit_code());
}
