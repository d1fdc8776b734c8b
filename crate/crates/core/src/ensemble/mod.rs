//! Measurement ensembles, restricted-ensemble observations, exhaustive ML
//! decoding, and Monte Carlo estimates of the decoding error.

pub mod decode;
pub mod matrix;
pub mod montecarlo;
pub mod observe;
pub mod oracle;
pub mod rng;

pub use decode::{ml_decode_a, ml_decode_a_capped, ml_decode_b};
pub use matrix::{sample_matrix, Ensemble, MeasurementMatrix};
pub use montecarlo::{
    monte_carlo_error, monte_carlo_error_with, wilson_interval, MonteCarloResult, Restricted, SimulationOptions,
};
pub use observe::{observe_a, observe_b};
pub use oracle::{
    default_density_grid, oracle_lemma1, oracle_lemma2, oracle_lemma3, oracle_lemma4, CovarianceOracleReport,
    DensityOracleReport,
};
