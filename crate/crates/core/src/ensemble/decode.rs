//! Exhaustive maximum-likelihood decoders for the restricted ensembles.
//!
//! Under unit Gaussian noise the likelihood is monotone in the residual
//! norm, so both decoders minimise `‖Y - βmin Σ X_j‖²`. The scan runs in
//! lexicographic order and only a strictly smaller residual replaces the
//! incumbent, so ties go to the lexicographically first candidate.

use super::matrix::MeasurementMatrix;
use crate::error::{Error, Result};
use crate::params::{enumeration_size, Combinations, SupportSet, DEFAULT_ENUMERATION_CAP};

fn check_rows(x: &MeasurementMatrix, y: &[f64]) -> Result<()> {
    if x.rows() != y.len() {
        return Err(Error::domain(format!("observation length {} does not match {} rows", y.len(), x.rows())));
    }
    Ok(())
}

pub fn ml_decode_a(x: &MeasurementMatrix, y: &[f64], k: usize, beta_min: f64) -> Result<SupportSet> {
    ml_decode_a_capped(x, y, k, beta_min, DEFAULT_ENUMERATION_CAP)
}

pub fn ml_decode_a_capped(
    x: &MeasurementMatrix,
    y: &[f64],
    k: usize,
    beta_min: f64,
    cap: usize,
) -> Result<SupportSet> {
    check_rows(x, y)?;
    let p = x.cols();
    if k == 0 || k > p {
        return Err(Error::domain(format!("need 1 <= k <= p, got k={k}, p={p}")));
    }
    enumeration_size(p, k, cap)?;
    let mut best: Option<(f64, Vec<usize>)> = None;
    let mut combos = Combinations::new(p, k);
    while let Some(s) = combos.current() {
        let mut residual = 0.0;
        for (i, &yi) in y.iter().enumerate() {
            let row = x.row(i);
            let fit: f64 = s.iter().map(|&j| row[j]).sum();
            let r = yi - beta_min * fit;
            residual += r * r;
        }
        if best.as_ref().is_none_or(|(b, _)| residual < *b) {
            best = Some((residual, s.to_vec()));
        }
        combos.advance();
    }
    let (_, indices) = best.expect("at least one subset");
    SupportSet::new(indices, p)
}

/// Index of the best-fitting column of the reduced matrix.
pub fn ml_decode_b(x: &MeasurementMatrix, y_tilde: &[f64], beta_min: f64) -> Result<usize> {
    check_rows(x, y_tilde)?;
    if x.cols() == 0 {
        return Err(Error::domain("restricted ensemble B needs at least one candidate column"));
    }
    let mut residuals = vec![0.0; x.cols()];
    for (i, &yi) in y_tilde.iter().enumerate() {
        for (acc, &xij) in residuals.iter_mut().zip(x.row(i)) {
            let r = yi - beta_min * xij;
            *acc += r * r;
        }
    }
    let mut best = 0;
    for (j, &r) in residuals.iter().enumerate().skip(1) {
        if r < residuals[best] {
            best = j;
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensemble::matrix::Ensemble;
    use crate::ensemble::observe::{observe_a, observe_b};

    #[test]
    fn noiseless_recovery() {
        for seed in 0..100 {
            let x = MeasurementMatrix::sample(5, 8, Ensemble::StdGaussian, seed).unwrap();
            let s = SupportSet::new(vec![(seed % 6) as usize, 7], 8).unwrap();
            let y = observe_a(&x, &s, 0.5, false, 0).unwrap();
            assert_eq!(ml_decode_a(&x, &y.values, 2, 0.5).unwrap(), s);
            let j = (seed % 8) as usize;
            let yb = observe_b(&x, j, 0.5, false, 0).unwrap();
            assert_eq!(ml_decode_b(&x, &yb.values, 0.5).unwrap(), j);
        }
    }

    #[test]
    fn ties_go_to_lexicographic_first() {
        // Columns 1 and 3 are identical; the truth {2, 3} ties with {1, 2}.
        let data = vec![
            0.3, 1.0, -0.4, 1.0, //
            -1.2, 0.5, 0.8, 0.5, //
            0.1, -2.0, 0.6, -2.0,
        ];
        let x = MeasurementMatrix::from_row_major(3, 4, data, Ensemble::StdGaussian).unwrap();
        let truth = SupportSet::new(vec![2, 3], 4).unwrap();
        let y = observe_a(&x, &truth, 1.0, false, 0).unwrap();
        let decoded = ml_decode_a(&x, &y.values, 2, 1.0).unwrap();
        assert_eq!(decoded.indices(), &[1, 2]);
        let yb = observe_b(&x, 3, 1.0, false, 0).unwrap();
        assert_eq!(ml_decode_b(&x, &yb.values, 1.0).unwrap(), 1);
    }

    #[test]
    fn zero_signal_returns_first_candidate() {
        let x = MeasurementMatrix::sample(4, 6, Ensemble::StdGaussian, 2).unwrap();
        let y = vec![0.4, -0.3, 1.1, 0.0];
        assert_eq!(ml_decode_a(&x, &y, 3, 0.0).unwrap().indices(), &[0, 1, 2]);
        assert_eq!(ml_decode_b(&x, &y, 0.0).unwrap(), 0);
    }

    #[test]
    fn single_candidate() {
        let x = MeasurementMatrix::sample(3, 1, Ensemble::StdGaussian, 2).unwrap();
        assert_eq!(ml_decode_b(&x, &[5.0, -1.0, 2.0], 1.0).unwrap(), 0);
    }

    #[test]
    fn capacity_is_enforced() {
        let x = MeasurementMatrix::sample(2, 30, Ensemble::StdGaussian, 2).unwrap();
        let err = ml_decode_a(&x, &[0.0, 0.0], 15, 1.0).unwrap_err();
        assert!(matches!(err, Error::Capacity { p: 30, k: 15, .. }));
        assert!(ml_decode_a_capped(&x, &[0.0, 0.0], 2, 1.0, 434).is_err());
        assert!(ml_decode_a_capped(&x, &[0.0, 0.0], 2, 1.0, 435).is_ok());
    }
}
