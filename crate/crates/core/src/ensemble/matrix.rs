use crate::error::{Error, Result};
use crate::params::ProblemParams;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;
use std::fmt;
use std::str::FromStr;

const SQRT_3: f64 = 1.732_050_807_568_877_2;

/// Entry distribution of a measurement matrix. All have mean 0 and variance 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Ensemble {
    StdGaussian,
    /// Uniform on `{-1, +1}`.
    Rademacher,
    /// Uniform on `[-√3, √3]`.
    UniformUnitVar,
    /// Zero with probability `1 - γ`, otherwise `N(0, 1/γ)`.
    SparsifiedGaussian(f64),
}

impl Ensemble {
    pub fn validate(&self) -> Result<()> {
        match *self {
            Ensemble::SparsifiedGaussian(g) if !(g > 0.0 && g <= 1.0) => {
                Err(Error::domain(format!("sparsified ensemble needs gamma in (0, 1], got {g}")))
            }
            _ => Ok(()),
        }
    }

    /// The ensemble implied by a parameter tuple: sparsified unless `γ = 1`.
    pub fn for_params(params: &ProblemParams) -> Self {
        if params.gamma < 1.0 {
            Ensemble::SparsifiedGaussian(params.gamma)
        } else {
            Ensemble::StdGaussian
        }
    }

    /// True when entries have a density, so ML ties have probability zero.
    pub fn is_continuous(&self) -> bool {
        match *self {
            Ensemble::StdGaussian | Ensemble::UniformUnitVar => true,
            Ensemble::SparsifiedGaussian(g) => g == 1.0,
            Ensemble::Rademacher => false,
        }
    }

    pub fn sample_entry<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            Ensemble::StdGaussian => rng.sample(StandardNormal),
            Ensemble::Rademacher => {
                if rng.random::<bool>() {
                    1.0
                } else {
                    -1.0
                }
            }
            Ensemble::UniformUnitVar => rng.random_range(-SQRT_3..SQRT_3),
            Ensemble::SparsifiedGaussian(g) => {
                if g >= 1.0 || rng.random::<f64>() < g {
                    rng.sample::<f64, _>(StandardNormal) / g.sqrt()
                } else {
                    0.0
                }
            }
        }
    }
}

impl fmt::Display for Ensemble {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ensemble::StdGaussian => f.write_str("std-gaussian"),
            Ensemble::Rademacher => f.write_str("rademacher"),
            Ensemble::UniformUnitVar => f.write_str("uniform"),
            Ensemble::SparsifiedGaussian(g) => write!(f, "sparsified({g})"),
        }
    }
}

impl FromStr for Ensemble {
    type Err = Error;

    /// Parses `std-gaussian`, `rademacher`, `uniform` or `sparsified(γ)`.
    /// Bare `sparsified` needs a γ supplied separately; see
    /// [`Ensemble::parse_with_gamma`].
    fn from_str(s: &str) -> Result<Self> {
        Self::parse_with_gamma(s, None)
    }
}

impl Ensemble {
    pub fn parse_with_gamma(s: &str, gamma: Option<f64>) -> Result<Self> {
        let s = s.trim();
        let e = match s {
            "std-gaussian" => Ensemble::StdGaussian,
            "rademacher" => Ensemble::Rademacher,
            "uniform" => Ensemble::UniformUnitVar,
            "sparsified" => Ensemble::SparsifiedGaussian(
                gamma.ok_or_else(|| Error::usage("ensemble 'sparsified' needs --gamma"))?,
            ),
            _ => {
                let g = s
                    .strip_prefix("sparsified(")
                    .and_then(|r| r.strip_suffix(')'))
                    .and_then(|g| g.trim().parse::<f64>().ok())
                    .ok_or_else(|| {
                        Error::usage(format!(
                            "unknown ensemble '{s}' (expected std-gaussian, rademacher, uniform or sparsified)"
                        ))
                    })?;
                Ensemble::SparsifiedGaussian(g)
            }
        };
        e.validate()?;
        Ok(e)
    }
}

/// Dense `rows × cols` matrix stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
    ensemble: Ensemble,
    seed: u64,
}

impl MeasurementMatrix {
    /// Draws every entry i.i.d. from `ensemble`, in row-major order, from a
    /// generator seeded with `seed`.
    pub fn sample(rows: usize, cols: usize, ensemble: Ensemble, seed: u64) -> Result<Self> {
        ensemble.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let data = (0..rows * cols).map(|_| ensemble.sample_entry(&mut rng)).collect();
        Ok(Self { rows, cols, data, ensemble, seed })
    }

    /// Wraps explicit row-major data, e.g. for hand-built test matrices.
    pub fn from_row_major(rows: usize, cols: usize, data: Vec<f64>, ensemble: Ensemble) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::domain(format!("expected {} entries, got {}", rows * cols, data.len())));
        }
        Ok(Self { rows, cols, data, ensemble, seed: 0 })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn ensemble(&self) -> Ensemble {
        self.ensemble
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }
}

/// `n × p` matrix for the given parameters.
pub fn sample_matrix(params: &ProblemParams, ensemble: Ensemble, seed: u64) -> Result<MeasurementMatrix> {
    MeasurementMatrix::sample(params.n, params.p, ensemble, seed)
}
