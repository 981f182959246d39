//! Fuzzy-adaptive evolutionary feature selection for tabular regression.
//!
//! The library implements FAGLSUD, an imperialist-competitive search over
//! binary feature masks whose three movement operators (global-learning
//! velocity adaptation, universal-diversity velocity divergence, and a
//! DE-style local search) are parameterised online by Mamdani fuzzy
//! inference systems, plus a fourth FIS that re-selects the operators'
//! application probabilities from the observed stagnation status. Candidate
//! subsets are scored by training a small MLP regressor on exactly those
//! columns (wrapper evaluation). A multi-objective variant (MOFAGLSUD)
//! replaces the scalar fitness with a rank-and-spread measure (SSDR) over
//! the objective vector `(n_f, RMSE, STD)` and maintains a bounded Pareto
//! archive.
//!
//! Entry points: [`search::run_single`] and [`multi::run_multi`]. Everything
//! is deterministic per `(seed, config, dataset)`.

pub mod data;
pub mod error;
pub mod fuzzy;
pub mod mlp;
pub mod multi;
pub mod objectives;
pub mod search;
pub mod synth;

pub use error::{Error, Result};
