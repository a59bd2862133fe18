//! Multi-objective fair principal component analysis.
//!
//! Given a dataset split into two sensitive groups, this crate computes the
//! classical PCA basis once and then searches over size-r subsets of its
//! components, exposing the Pareto trade-off between total reconstruction
//! error and a group-disparity fairness measure. A single balanced solution
//! can be picked from the front with a scale-compensated weighted sum.
//!
//! Typical flow:
//!
//! ```no_run
//! use mofpca::dataset::{load_csv, standardize, ScalingMode};
//! use mofpca::pca::compute_basis;
//! use mofpca::spea2::{default_config, run, DatasetKind};
//! use mofpca::selection::{compute_lambda, select_solution};
//!
//! let (table, groups) = load_csv("data.csv", "group", "a")?;
//! let ds = standardize(table, &groups, ScalingMode::ZScore);
//! let basis = compute_basis(&ds)?;
//! let mut cfg = default_config(basis.dim(), 5, DatasetKind::Tabular)?;
//! cfg.seed = 42;
//! let outcome = run(&basis, &cfg)?;
//! let weights = compute_lambda(&basis);
//! let chosen = select_solution(&outcome.front, &weights)?;
//! println!("{} -> {:?}", chosen.selection, chosen.objectives);
//! # Ok::<(), mofpca::error::Error>(())
//! ```

pub mod dataset;
pub mod dominance;
pub mod error;
pub mod harness;
pub mod linalg;
pub mod pca;
pub mod selection;
pub mod spea2;

pub use error::{Error, Result};
