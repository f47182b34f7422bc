//! Experiment configs, inequality-ratio sweeps and report emission.
//!
//! A suite is a TOML document of experiments. Each experiment expands into
//! cases, each case into a [`RatioRow`] carrying the constants its right-hand
//! side was built from, and each experiment into a [`RatioReport`] checked
//! against a frozen constant from the [`Registry`].

mod config;
mod corpus;
mod lemmas;
mod ratios;
mod registry;
mod report;
mod suite;

/// The shipped acceptance suite.
pub const DEFAULT_CONFIG: &str = include_str!("../../configs/default.toml");

pub use config::{Experiment, ExperimentConfig, ExperimentKind, GridDecl, Tolerances};
pub use corpus::{standard_functions, TestFunction};
pub use lemmas::{
    carleson_row, chain_rows, corpus_case, dual_sparse_row, orlicz_sparse_row, rdf_rows, rhi_row,
    CorpusCase,
};
pub use ratios::{
    ratio_ap, ratio_aq, ratio_maximal_ap, ratio_mixed, ratio_two_weight,
    ratio_two_weight_commutator, RatioContext, RatioKind, RatioRow,
};
pub use registry::{Entry, Registry, SHIPPED};
pub use report::{write_json, write_reports, write_rows_csv, Check, RatioReport, Summary, SummaryEntry};
pub use suite::{registry_for, run_config, run_experiment, run_suite, SuiteContext, SuiteOutcome};
