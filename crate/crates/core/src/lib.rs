//! A numerical laboratory for quantitative weighted norm inequalities.
//!
//! The crate discretizes Muckenhoupt weight constants, maximal operators
//! (Hardy–Littlewood, power, iterated, Orlicz), rough homogeneous singular
//! integrals and their BMO commutators, Littlewood–Paley pieces, and sparse
//! operators on uniform one- and two-dimensional grids, and measures how the
//! classical two-weight and `A_1`–`A_∞` estimates behave on them.
//!
//! Module map:
//!
//! * [`grid`]: grids, sampled functions, dyadic lattices, averages, `L^p(w)` norms
//! * [`maximal`]: maximal operators, Young functions, Rubio de Francia
//! * [`weights`]: `A_p`, `A_1`, `A_∞` constants, reverse Hölder, BMO
//! * [`operators`]: rough singular integrals, commutators, decomposition
//! * [`sparse`]: sparse families and the inequalities they satisfy
//! * [`harness`]: experiment configs, ratio sweeps, reports

pub mod error;
pub mod grid;
pub mod harness;
pub mod maximal;
pub mod operators;
pub mod sparse;
pub mod weights;

pub use error::{Error, Result};
