//! Information-theoretic limits on exact support recovery from dense and
//! sparsified random measurements.
//!
//! [`bounds`] evaluates the closed-form necessary conditions, [`mixture`]
//! computes the Gaussian-mixture entropies they depend on, and [`ensemble`]
//! samples measurement matrices and runs exhaustive maximum-likelihood
//! decoding for Monte Carlo cross-checks.

pub mod bounds;
pub mod cli;
pub mod ensemble;
pub mod error;
pub mod mixture;
pub mod params;

pub use error::{Error, Result};
pub use params::ProblemParams;
