//! Principal component analysis for a mixture of quantitative and
//! qualitative variables (PCAMIX), with varimax rotation.
//!
//! Quantitative columns are standardized and qualitative columns are
//! recoded through their centered indicator matrix; a single singular
//! value decomposition of the recoded matrix then yields component
//! scores, loadings of the quantitative variables, principal
//! coordinates of the categories and squared loadings (squared
//! correlations for quantitative variables, correlation ratios for
//! qualitative ones). Rotation maximizes the varimax criterion on the
//! squared loadings with a closed-form optimal angle per plane.
//!
//! The [`quantification`] module carries the older formulation based on
//! per-variable n-by-n quantification matrices. It produces the same
//! variances and squared loadings and serves as an independent check
//! and as the slow baseline of the [`simbench`] timing harness.

pub mod data;
pub mod error;
pub mod linalg;
pub mod model;
pub mod quantification;
pub mod rotation;
pub mod simbench;

pub use data::{recode, CategoryMap, Column, ColumnKind, MixedTable, RecodedMatrix};
pub use error::{Error, Result};
pub use model::{fit, PcamixModel};
pub use rotation::{rotate, RotationResult};
