use super::decode::{ml_decode_a_capped, ml_decode_b};
use super::matrix::{Ensemble, MeasurementMatrix};
use super::observe::{observe_a, observe_b};
use super::rng::{derive_seed, substream, Purpose};
use crate::error::{Error, Result};
use crate::params::{enumeration_size, ProblemParams, SupportSet, DEFAULT_ENUMERATION_CAP};
use rand::seq::index::sample as sample_indices;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;
use std::fmt;
use std::str::FromStr;

/// Two-sided 95% normal quantile.
pub const Z_95: f64 = 1.959_963_984_540_054;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Restricted {
    A,
    B,
}

impl fmt::Display for Restricted {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Restricted::A => "A",
            Restricted::B => "B",
        })
    }
}

impl FromStr for Restricted {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "A" | "a" => Ok(Restricted::A),
            "B" | "b" => Ok(Restricted::B),
            other => Err(Error::usage(format!("restricted ensemble must be A or B, got '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonteCarloResult {
    pub trials: usize,
    pub errors: usize,
    pub p_hat: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub seed: u64,
    pub ensemble: Ensemble,
    pub restricted: Restricted,
}

impl MonteCarloResult {
    /// Plug-in standard error `sqrt(p̂(1-p̂)/trials)`.
    pub fn std_error(&self) -> f64 {
        (self.p_hat * (1.0 - self.p_hat) / self.trials as f64).sqrt()
    }
}

/// Wilson score interval at 95% for `errors` out of `trials`.
pub fn wilson_interval(errors: usize, trials: usize) -> (f64, f64) {
    let t = trials as f64;
    let p = errors as f64 / t;
    let z2 = Z_95 * Z_95;
    let denom = 1.0 + z2 / t;
    let center = (p + z2 / (2.0 * t)) / denom;
    let half = Z_95 / denom * (p * (1.0 - p) / t + z2 / (4.0 * t * t)).sqrt();
    // Rounding can push an endpoint past p̂ when errors is 0 or trials.
    ((center - half).clamp(0.0, p), (center + half).clamp(p, 1.0))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimulationOptions {
    /// Add unit Gaussian noise to the observations.
    pub noise: bool,
    pub enumeration_cap: usize,
}

impl Default for SimulationOptions {
    fn default() -> Self {
        Self { noise: true, enumeration_cap: DEFAULT_ENUMERATION_CAP }
    }
}

pub fn monte_carlo_error(
    params: &ProblemParams,
    ensemble: Ensemble,
    which: Restricted,
    trials: usize,
    seed: u64,
) -> Result<MonteCarloResult> {
    monte_carlo_error_with(params, ensemble, which, trials, seed, SimulationOptions::default())
}

/// Runs `trials` independent decoding experiments. Trial `t` draws its
/// matrix, support (or `j*`) and noise from substreams keyed by `(seed, t)`.
pub fn monte_carlo_error_with(
    params: &ProblemParams,
    ensemble: Ensemble,
    which: Restricted,
    trials: usize,
    seed: u64,
    options: SimulationOptions,
) -> Result<MonteCarloResult> {
    if trials == 0 {
        return Err(Error::domain("monte carlo needs at least one trial"));
    }
    ensemble.validate()?;
    if which == Restricted::A {
        enumeration_size(params.p, params.k, options.enumeration_cap)?;
    }
    let outcomes: Vec<bool> = (0..trials as u64)
        .into_par_iter()
        .map(|t| run_trial(params, ensemble, which, seed, t, options))
        .collect::<Result<_>>()?;
    let errors = outcomes.iter().filter(|&&e| e).count();
    let (ci_low, ci_high) = wilson_interval(errors, trials);
    Ok(MonteCarloResult {
        trials,
        errors,
        p_hat: errors as f64 / trials as f64,
        ci_low,
        ci_high,
        seed,
        ensemble,
        restricted: which,
    })
}

/// Returns `true` when the decoder errs.
fn run_trial(
    params: &ProblemParams,
    ensemble: Ensemble,
    which: Restricted,
    seed: u64,
    t: u64,
    options: SimulationOptions,
) -> Result<bool> {
    let matrix_seed = derive_seed(seed, t, Purpose::Matrix);
    let noise_seed = derive_seed(seed, t, Purpose::Noise);
    match which {
        Restricted::A => {
            let x = MeasurementMatrix::sample(params.n, params.p, ensemble, matrix_seed)?;
            let mut rng = substream(seed, t, Purpose::Support);
            let support = SupportSet::from_unsorted(sample_indices(&mut rng, params.p, params.k).into_vec(), params.p)?;
            let y = observe_a(&x, &support, params.beta_min, options.noise, noise_seed)?;
            let decoded = ml_decode_a_capped(&x, &y.values, params.k, params.beta_min, options.enumeration_cap)?;
            Ok(decoded != support)
        }
        Restricted::B => {
            let m = params.reduced_candidates();
            let x = MeasurementMatrix::sample(params.n, m, ensemble, matrix_seed)?;
            let j_star = substream(seed, t, Purpose::Index).random_range(0..m);
            let y = observe_b(&x, j_star, params.beta_min, options.noise, noise_seed)?;
            Ok(ml_decode_b(&x, &y.values, params.beta_min)? != j_star)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wilson_brackets_estimate() {
        let (lo, hi) = wilson_interval(0, 50);
        assert_eq!(lo, 0.0);
        assert!(hi > 0.0 && hi < 0.1);
        let (lo, hi) = wilson_interval(50, 50);
        assert!(lo > 0.9 && hi == 1.0);
        // 20/100, checked against an independent evaluation.
        let (lo, hi) = wilson_interval(20, 100);
        assert!((lo - 0.133_367).abs() < 1e-5 && (hi - 0.288_829).abs() < 1e-5, "{lo} {hi}");
    }

    #[test]
    fn zero_trials_rejected() {
        let pm = ProblemParams::new(5, 6, 2, 1.0, 1.0).unwrap();
        assert!(monte_carlo_error(&pm, Ensemble::StdGaussian, Restricted::A, 0, 1).is_err());
    }

    #[test]
    fn high_snr_is_easy() {
        let pm = ProblemParams::new(30, 6, 2, 5.0, 1.0).unwrap();
        let r = monte_carlo_error(&pm, Ensemble::StdGaussian, Restricted::A, 500, 3).unwrap();
        assert!(r.p_hat <= 0.05, "{r:?}");
        assert!(r.ci_low <= r.p_hat && r.p_hat <= r.ci_high);
    }

    #[test]
    fn chance_level_without_signal() {
        let pm = ProblemParams::null_signal(10, 8, 3, 1.0).unwrap();
        let r = monte_carlo_error(&pm, Ensemble::StdGaussian, Restricted::B, 4000, 8).unwrap();
        let expected = 1.0 - 1.0 / 6.0;
        assert!((r.p_hat - expected).abs() <= 3.0 * r.std_error().max(1e-3), "{}", r.p_hat);
    }

    #[test]
    fn noiseless_trials_never_err() {
        let pm = ProblemParams::new(6, 10, 3, 0.3, 1.0).unwrap();
        let opts = SimulationOptions { noise: false, ..Default::default() };
        for (e, w) in [
            (Ensemble::StdGaussian, Restricted::A),
            (Ensemble::UniformUnitVar, Restricted::A),
            (Ensemble::StdGaussian, Restricted::B),
        ] {
            assert_eq!(monte_carlo_error_with(&pm, e, w, 100, 5, opts).unwrap().errors, 0);
        }
    }

    #[test]
    fn independent_of_thread_count() {
        let pm = ProblemParams::new(8, 9, 2, 0.6, 0.3).unwrap();
        let e = Ensemble::SparsifiedGaussian(0.3);
        let run = |threads| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| monte_carlo_error(&pm, e, Restricted::A, 300, 99).unwrap())
        };
        assert_eq!(run(1), run(4));
    }
}
