//! Brute-force Monte Carlo checks of the average-covariance and
//! average-density identities for the restricted ensembles.
//!
//! Draws are processed in fixed-size chunks, each with its own substream,
//! and chunk results are merged in chunk order, so reports are bitwise
//! reproducible for any thread count.

use super::matrix::Ensemble;
use super::rng::{substream, Purpose};
use crate::error::{Error, Result};
use crate::mixture::{build_psi1, build_psi2, density};
use crate::params::{enumeration_size, Combinations, ProblemParams, DEFAULT_ENUMERATION_CAP};
use rand::seq::index::sample as sample_indices;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::PI;

const CHUNK: usize = 4096;

fn chunks(samples: usize) -> Vec<(u64, usize)> {
    (0..samples.div_ceil(CHUNK))
        .map(|c| (c as u64, CHUNK.min(samples - c * CHUNK)))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CovarianceOracleReport {
    /// Monte Carlo estimate of `E_X[Λ(X)]`, row-major `n × n`.
    pub empirical: Vec<Vec<f64>>,
    pub predicted_diag: f64,
    pub max_offdiag_abs: f64,
    pub max_diag_reldev: f64,
    /// Mean diagonal of the uncentred second moment `E[Y Yᵀ]`.
    pub raw_diag: f64,
    pub predicted_raw_diag: f64,
    /// Largest standard error among the diagonal estimates.
    pub diag_std_error: f64,
    pub samples: usize,
}

#[derive(Clone)]
struct MomentAccumulator {
    n: usize,
    centred: Vec<f64>,
    raw: Vec<f64>,
    diag_sq: Vec<f64>,
}

impl MomentAccumulator {
    fn new(n: usize) -> Self {
        Self { n, centred: vec![0.0; n * n], raw: vec![0.0; n * n], diag_sq: vec![0.0; n] }
    }

    fn add(&mut self, y: &[f64], mu: &[f64]) {
        let n = self.n;
        for a in 0..n {
            for b in 0..n {
                let raw = y[a] * y[b];
                self.raw[a * n + b] += raw;
                self.centred[a * n + b] += raw - mu[a] * mu[b];
            }
            let d = y[a] * y[a] - mu[a] * mu[a];
            self.diag_sq[a] += d * d;
        }
    }

    fn merge(mut self, other: &Self) -> Self {
        for (x, y) in self.centred.iter_mut().zip(&other.centred) {
            *x += y;
        }
        for (x, y) in self.raw.iter_mut().zip(&other.raw) {
            *x += y;
        }
        for (x, y) in self.diag_sq.iter_mut().zip(&other.diag_sq) {
            *x += y;
        }
        self
    }

    fn report(self, samples: usize, predicted_diag: f64, predicted_raw_diag: f64) -> CovarianceOracleReport {
        let n = self.n;
        let s = samples as f64;
        let empirical: Vec<Vec<f64>> = (0..n).map(|a| (0..n).map(|b| self.centred[a * n + b] / s).collect()).collect();
        let mut max_offdiag_abs: f64 = 0.0;
        let mut max_diag_reldev: f64 = 0.0;
        let mut diag_std_error: f64 = 0.0;
        for a in 0..n {
            for b in 0..n {
                if a != b {
                    max_offdiag_abs = max_offdiag_abs.max(empirical[a][b].abs());
                }
            }
            let mean = empirical[a][a];
            max_diag_reldev = max_diag_reldev.max((mean - predicted_diag).abs() / predicted_diag);
            let var = (self.diag_sq[a] / s - mean * mean).max(0.0) * s / (s - 1.0).max(1.0);
            diag_std_error = diag_std_error.max((var / s).sqrt());
        }
        let raw_diag = (0..n).map(|a| self.raw[a * n + a]).sum::<f64>() / (s * n as f64);
        CovarianceOracleReport {
            empirical,
            predicted_diag,
            max_offdiag_abs,
            max_diag_reldev,
            raw_diag,
            predicted_raw_diag,
            diag_std_error,
            samples,
        }
    }
}

fn check_samples(samples: usize) -> Result<()> {
    if samples < 2 {
        return Err(Error::domain("oracle needs at least two samples"));
    }
    Ok(())
}

/// Predicted `E_X Λ(X)` diagonal for restricted ensemble A.
pub fn lemma1_predicted_diag(p: usize, k: usize, beta_min: f64) -> f64 {
    let kf = k as f64;
    1.0 + kf * beta_min * beta_min * (1.0 - kf / p as f64)
}

pub fn lemma2_predicted_diag(p: usize, k: usize, beta_min: f64) -> f64 {
    1.0 + beta_min * beta_min * (1.0 - 1.0 / (p - k + 1) as f64)
}

/// Restricted ensemble A: draws `(X, S, W)` jointly and centres each `Y`
/// by the conditional mean `μ(X) = βmin (k/p) Σ_j X_j`.
pub fn oracle_lemma1(
    params: &ProblemParams,
    ensemble: Ensemble,
    samples: usize,
    seed: u64,
) -> Result<CovarianceOracleReport> {
    check_samples(samples)?;
    ensemble.validate()?;
    let (n, p, k, beta) = (params.n, params.p, params.k, params.beta_min);
    let mean_weight = beta * k as f64 / p as f64;
    let parts: Vec<MomentAccumulator> = chunks(samples)
        .into_par_iter()
        .map(|(c, len)| {
            let mut rng = substream(seed, c, Purpose::Oracle);
            let mut acc = MomentAccumulator::new(n);
            let mut x = vec![0.0; n * p];
            let (mut y, mut mu) = (vec![0.0; n], vec![0.0; n]);
            for _ in 0..len {
                x.iter_mut().for_each(|v| *v = ensemble.sample_entry(&mut rng));
                let support = sample_indices(&mut rng, p, k);
                for i in 0..n {
                    let row = &x[i * p..(i + 1) * p];
                    let w: f64 = rng.sample(StandardNormal);
                    y[i] = beta * support.iter().map(|j| row[j]).sum::<f64>() + w;
                    mu[i] = mean_weight * row.iter().sum::<f64>();
                }
                acc.add(&y, &mu);
            }
            acc
        })
        .collect();
    let total = parts.iter().fold(MomentAccumulator::new(n), |a, b| a.merge(b));
    Ok(total.report(samples, lemma1_predicted_diag(p, k, beta), 1.0 + k as f64 * beta * beta))
}

/// Restricted ensemble B over the reduced `n × (p-k+1)` matrix.
pub fn oracle_lemma2(
    params: &ProblemParams,
    ensemble: Ensemble,
    samples: usize,
    seed: u64,
) -> Result<CovarianceOracleReport> {
    check_samples(samples)?;
    ensemble.validate()?;
    let (n, beta) = (params.n, params.beta_min);
    let m = params.reduced_candidates();
    let mean_weight = beta / m as f64;
    let parts: Vec<MomentAccumulator> = chunks(samples)
        .into_par_iter()
        .map(|(c, len)| {
            let mut rng = substream(seed, c, Purpose::Oracle);
            let mut acc = MomentAccumulator::new(n);
            let mut x = vec![0.0; n * m];
            let (mut y, mut mu) = (vec![0.0; n], vec![0.0; n]);
            for _ in 0..len {
                x.iter_mut().for_each(|v| *v = ensemble.sample_entry(&mut rng));
                let j_star = rng.random_range(0..m);
                for i in 0..n {
                    let row = &x[i * m..(i + 1) * m];
                    let w: f64 = rng.sample(StandardNormal);
                    y[i] = beta * row[j_star] + w;
                    mu[i] = mean_weight * row.iter().sum::<f64>();
                }
                acc.add(&y, &mu);
            }
            acc
        })
        .collect();
    let total = parts.iter().fold(MomentAccumulator::new(n), |a, b| a.merge(b));
    Ok(total.report(samples, lemma2_predicted_diag(params.p, params.k, beta), 1.0 + beta * beta))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DensityOracleReport {
    pub grid: Vec<f64>,
    /// Monte Carlo average of the conditional density at each grid point.
    pub empirical: Vec<f64>,
    /// The Gaussian mixture density at each grid point.
    pub predicted: Vec<f64>,
    pub max_abs_dev: f64,
    pub max_std_error: f64,
    pub samples: usize,
}

fn std_normal_pdf(z: f64) -> f64 {
    (-0.5 * z * z).exp() / (2.0 * PI).sqrt()
}

/// Sums of `βmin Σ_{j∈S} x_j`, one per candidate, filled from a fresh row.
type Offsets = dyn Fn(&[f64], &mut Vec<f64>) + Sync;

fn density_oracle(
    width: usize,
    gamma: f64,
    offsets: &Offsets,
    grid: &[f64],
    predicted: Vec<f64>,
    samples: usize,
    seed: u64,
) -> Result<DensityOracleReport> {
    check_samples(samples)?;
    if grid.is_empty() {
        return Err(Error::domain("density oracle needs a nonempty grid"));
    }
    let ensemble = Ensemble::SparsifiedGaussian(gamma);
    ensemble.validate()?;
    let g = grid.len();
    let parts: Vec<(Vec<f64>, Vec<f64>)> = chunks(samples)
        .into_par_iter()
        .map(|(c, len)| {
            let mut rng: ChaCha8Rng = substream(seed, c, Purpose::Oracle);
            let (mut sum, mut sq) = (vec![0.0; g], vec![0.0; g]);
            let mut row = vec![0.0; width];
            let mut shifts = Vec::new();
            for _ in 0..len {
                row.iter_mut().for_each(|v| *v = ensemble.sample_entry(&mut rng));
                offsets(&row, &mut shifts);
                let scale = 1.0 / shifts.len() as f64;
                for (idx, &y) in grid.iter().enumerate() {
                    let psi = scale * shifts.iter().map(|&s| std_normal_pdf(y - s)).sum::<f64>();
                    sum[idx] += psi;
                    sq[idx] += psi * psi;
                }
            }
            (sum, sq)
        })
        .collect();
    let (mut sum, mut sq) = (vec![0.0; g], vec![0.0; g]);
    for (s, q) in &parts {
        for idx in 0..g {
            sum[idx] += s[idx];
            sq[idx] += q[idx];
        }
    }
    let n = samples as f64;
    let empirical: Vec<f64> = sum.iter().map(|s| s / n).collect();
    let max_abs_dev = empirical.iter().zip(&predicted).map(|(e, p)| (e - p).abs()).fold(0.0, f64::max);
    let max_std_error = empirical
        .iter()
        .zip(&sq)
        .map(|(m, q)| ((q / n - m * m).max(0.0) / (n - 1.0)).sqrt())
        .fold(0.0, f64::max);
    Ok(DensityOracleReport { grid: grid.to_vec(), empirical, predicted, max_abs_dev, max_std_error, samples })
}

/// Restricted ensemble A under sparsified rows: the average over `X` of
/// `(1/C(p,k)) Σ_S φ(y - βmin Σ_{j∈S} X_ij)` against the binomial mixture.
pub fn oracle_lemma3(params: &ProblemParams, y_grid: &[f64], samples: usize, seed: u64) -> Result<DensityOracleReport> {
    let (p, k, beta) = (params.p, params.k, params.beta_min);
    enumeration_size(p, k, DEFAULT_ENUMERATION_CAP)?;
    let subsets: Vec<Vec<usize>> = Combinations::new(p, k).collect();
    let mix = build_psi1(k, params.gamma, beta)?;
    let predicted = y_grid.iter().map(|&y| density(&mix, y)).collect();
    let offsets = move |row: &[f64], out: &mut Vec<f64>| {
        out.clear();
        out.extend(subsets.iter().map(|s| beta * s.iter().map(|&j| row[j]).sum::<f64>()));
    };
    density_oracle(p, params.gamma, &offsets, y_grid, predicted, samples, seed)
}

/// Restricted ensemble B: `(1/(p-k+1)) Σ_j φ(y - βmin X_ij)` against the
/// Bernoulli mixture.
pub fn oracle_lemma4(params: &ProblemParams, y_grid: &[f64], samples: usize, seed: u64) -> Result<DensityOracleReport> {
    let beta = params.beta_min;
    let mix = build_psi2(params.gamma, beta)?;
    let predicted = y_grid.iter().map(|&y| density(&mix, y)).collect();
    let offsets = move |row: &[f64], out: &mut Vec<f64>| {
        out.clear();
        out.extend(row.iter().map(|&x| beta * x));
    };
    density_oracle(params.reduced_candidates(), params.gamma, &offsets, y_grid, predicted, samples, seed)
}

/// `{-4, -3.5, …, 4}`.
pub fn default_density_grid() -> Vec<f64> {
    (0..=16).map(|i| -4.0 + 0.5 * i as f64).collect()
}
