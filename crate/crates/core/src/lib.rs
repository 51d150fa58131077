//! Natural operators of linear connections: exact symbol algebra, jet
//! evaluation of tensor expressions, and graph-space dimension counts.

pub mod cli;
pub mod error;
pub mod graph_space;
pub mod jet_calculus;
pub mod linalg;
pub mod perm_algebra;
pub mod scalar;

pub use error::{Error, Result};
pub use scalar::Scalar;

/// Exact rational scalars used by default.
pub type Q = num_rational::BigRational;
