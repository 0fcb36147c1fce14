//! Analytics over cross-task transfer experiments.
//!
//! The central object is a performance matrix: rows are model variants
//! (a base model and one adapter per source dataset), columns are evaluation
//! tasks. From it the crate derives latent traits by PCA, transfer gains
//! over the base row and pair asymmetries. Dataset-side diagnostics (length
//! distributions, class balance, embedding similarity) and math word-problem
//! features help explain which gains are expected and which are not.

pub mod classify;
pub mod error;
pub mod io;
pub mod linalg;
pub mod lingfeat;
pub mod pca;
pub mod report;
pub mod similarity;
pub mod stats;
pub mod transfer;

pub use error::{Error, Result};
