use super::ratios::RatioRow;
use crate::error::Result;
use serde::{Deserialize, Serialize};
use std::io::Write;
use std::path::Path;

/// A scalar assertion attached to a report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub bound: f64,
    /// `"<="` or `">"`.
    pub relation: String,
    pub pass: bool,
}

impl Check {
    pub fn at_most(name: impl Into<String>, value: f64, bound: f64) -> Self {
        Self {
            name: name.into(),
            value,
            bound,
            relation: "<=".into(),
            pass: value <= bound,
        }
    }

    pub fn above(name: impl Into<String>, value: f64, bound: f64) -> Self {
        Self {
            name: name.into(),
            value,
            bound,
            relation: ">".into(),
            pass: value > bound,
        }
    }
}

/// Rows of one experiment with their summary statistics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatioReport {
    pub id: String,
    pub kind: String,
    /// Registry key or fixed constant the ratios are held to.
    pub bound_key: String,
    /// `None` when the rows are data and only `checks` are asserted.
    pub bound: Option<f64>,
    pub rows: Vec<RatioRow>,
    pub max_ratio: f64,
    pub median_ratio: f64,
    pub checks: Vec<Check>,
    pub pass: bool,
}

impl RatioReport {
    /// Summarizes `rows`, adds the `max_ratio <= bound` check and sets `pass`.
    pub fn new(
        id: &str,
        kind: &str,
        bound_key: &str,
        bound: Option<f64>,
        mut rows: Vec<RatioRow>,
        mut checks: Vec<Check>,
    ) -> Self {
        for (i, row) in rows.iter_mut().enumerate() {
            row.experiment = id.to_string();
            row.case = i;
        }
        let mut sorted: Vec<f64> = rows.iter().map(|r| r.ratio).collect();
        sorted.sort_by(f64::total_cmp);
        let max_ratio = sorted.last().copied().unwrap_or(0.0);
        let median_ratio = match sorted.len() {
            0 => 0.0,
            n if n % 2 == 1 => sorted[n / 2],
            n => 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]),
        };
        if let (Some(b), false) = (bound, rows.is_empty()) {
            checks.insert(0, Check::at_most("max_ratio", max_ratio, b));
        }
        let pass = checks.iter().all(|c| c.pass);
        Self {
            id: id.to_string(),
            kind: kind.to_string(),
            bound_key: bound_key.to_string(),
            bound,
            rows,
            max_ratio,
            median_ratio,
            checks,
            pass,
        }
    }

    pub fn violations(&self) -> usize {
        match self.bound {
            Some(b) => self.rows.iter().filter(|r| r.ratio > b).count(),
            None => 0,
        }
    }
}

/// Per-experiment line of the suite summary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryEntry {
    pub id: String,
    pub kind: String,
    pub cases: usize,
    pub max_ratio: f64,
    pub median_ratio: f64,
    pub bound_key: String,
    pub bound: Option<f64>,
    pub violations: usize,
    pub checks: Vec<Check>,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub pass: bool,
    pub experiments: Vec<SummaryEntry>,
}

impl Summary {
    pub fn of(reports: &[RatioReport]) -> Self {
        let experiments: Vec<SummaryEntry> = reports
            .iter()
            .map(|r| SummaryEntry {
                id: r.id.clone(),
                kind: r.kind.clone(),
                cases: r.rows.len(),
                max_ratio: r.max_ratio,
                median_ratio: r.median_ratio,
                bound_key: r.bound_key.clone(),
                bound: r.bound,
                violations: r.violations(),
                checks: r.checks.clone(),
                pass: r.pass,
            })
            .collect();
        Self {
            pass: experiments.iter().all(|e| e.pass),
            experiments,
        }
    }
}

/// All rows in experiment order, one line per case.
pub fn write_rows_csv(reports: &[RatioReport], out: impl Write) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut any = false;
    for r in reports {
        for row in &r.rows {
            w.serialize(row)?;
            any = true;
        }
    }
    if !any {
        w.write_record(CSV_HEADER)?;
    }
    w.flush()?;
    Ok(())
}

const CSV_HEADER: [&str; 19] = [
    "experiment", "case", "function", "weight", "detail", "p", "r", "theta", "q", "omega_inf",
    "bmo", "a_p", "a_1", "a_inf", "factor", "norm_f", "lhs", "rhs", "ratio",
];

pub fn write_json<T: Serialize>(value: &T, out: impl Write) -> Result<()> {
    let mut out = out;
    serde_json::to_writer_pretty(&mut out, value)?;
    writeln!(out)?;
    Ok(())
}

/// Writes `rows.csv`, `reports.json` and `summary.json` into `dir`.
pub fn write_reports(dir: &Path, reports: &[RatioReport]) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    let file = |name: &str| std::fs::File::create(dir.join(name)).map(std::io::BufWriter::new);
    write_rows_csv(reports, file("rows.csv")?)?;
    write_json(&reports, file("reports.json")?)?;
    write_json(&Summary::of(reports), file("summary.json")?)?;
    Ok(())
}
