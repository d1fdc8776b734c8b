use super::matrix::MeasurementMatrix;
use crate::error::{Error, Result};
use crate::params::{ObservationVector, SupportSet};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

fn add_noise(values: &mut [f64], noise: bool, seed: u64) {
    if noise {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for v in values {
            *v += rng.sample::<f64, _>(StandardNormal);
        }
    }
}

/// Restricted ensemble A: `Y = βmin Σ_{j∈S} X_j + W`.
pub fn observe_a(
    x: &MeasurementMatrix,
    support: &SupportSet,
    beta_min: f64,
    noise: bool,
    seed: u64,
) -> Result<ObservationVector> {
    if support.indices().last().is_some_and(|&j| j >= x.cols()) {
        return Err(Error::domain(format!("support exceeds the {} matrix columns", x.cols())));
    }
    let mut values: Vec<f64> = (0..x.rows())
        .map(|i| {
            let row = x.row(i);
            beta_min * support.indices().iter().map(|&j| row[j]).sum::<f64>()
        })
        .collect();
    add_noise(&mut values, noise, seed);
    Ok(ObservationVector { values, noise_realized: noise })
}

/// Restricted ensemble B: `Ỹ = βmin X_{j*} + W`, with `x` the reduced
/// matrix whose columns are the `p - k + 1` remaining candidates.
pub fn observe_b(
    x: &MeasurementMatrix,
    j_star: usize,
    beta_min: f64,
    noise: bool,
    seed: u64,
) -> Result<ObservationVector> {
    if j_star >= x.cols() {
        return Err(Error::domain(format!("j_star={j_star} outside the {} candidate columns", x.cols())));
    }
    let mut values: Vec<f64> = (0..x.rows()).map(|i| beta_min * x.get(i, j_star)).collect();
    add_noise(&mut values, noise, seed);
    Ok(ObservationVector { values, noise_realized: noise })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensemble::matrix::Ensemble;

    #[test]
    fn noiseless_single_column() {
        let x = MeasurementMatrix::sample(6, 5, Ensemble::StdGaussian, 1).unwrap();
        let s = SupportSet::new(vec![3], 5).unwrap();
        let y = observe_a(&x, &s, 0.7, false, 0).unwrap();
        assert!(!y.noise_realized);
        for i in 0..6 {
            assert_eq!(y.values[i], 0.7 * x.get(i, 3));
        }
        let yb = observe_b(&x, 3, 0.7, false, 0).unwrap();
        assert_eq!(yb.values, y.values);
    }

    #[test]
    fn out_of_range_inputs() {
        let x = MeasurementMatrix::sample(2, 3, Ensemble::StdGaussian, 1).unwrap();
        assert!(observe_a(&x, &SupportSet::new(vec![1, 4], 6).unwrap(), 1.0, true, 0).is_err());
        assert!(observe_b(&x, 3, 1.0, true, 0).is_err());
    }

    #[test]
    fn zero_signal_is_pure_noise() {
        let x = MeasurementMatrix::sample(4, 3, Ensemble::StdGaussian, 1).unwrap();
        let a = observe_b(&x, 0, 0.0, true, 77).unwrap();
        let b = observe_b(&x, 2, 0.0, true, 77).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn observation_moments() {
        // βmin = 1, k = 2, p = 6: E[Y1] = 0 and E[Y1²] = 1 + k βmin².
        let s = SupportSet::new(vec![0, 4], 6).unwrap();
        let draws = 100_000u64;
        let (mut sum, mut sq) = (0.0, 0.0);
        for t in 0..draws {
            let x = MeasurementMatrix::sample(1, 6, Ensemble::StdGaussian, t).unwrap();
            let y = observe_a(&x, &s, 1.0, true, t ^ 0xdead_beef).unwrap().values[0];
            sum += y;
            sq += y * y;
        }
        let mean = sum / draws as f64;
        let second = sq / draws as f64;
        assert!(mean.abs() <= 0.02, "{mean}");
        let se = (2.0 * 9.0 / draws as f64).sqrt();
        assert!((second - 3.0).abs() <= 4.0 * se, "{second}");
    }
}
