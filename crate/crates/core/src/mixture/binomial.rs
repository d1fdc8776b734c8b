//! Binomial and Bernoulli label distributions: pmf, entropies, and the
//! bounds on `E[½ ln(1 + L βmin²/γ)]` for `L ~ Bin(k, γ)`.

use crate::bounds::{classify_regime, Regime};
use crate::params::log_choose_unchecked;
use serde::Serialize;
use std::f64::consts::{E, PI};

/// `n ln x` with the convention `0 ln 0 = 0`.
fn scaled_ln(n: usize, ln_x: f64) -> f64 {
    if n == 0 {
        0.0
    } else {
        n as f64 * ln_x
    }
}

/// Log-probabilities `ln P(L = ℓ)` for `ℓ = 0..=k`, computed in log space.
/// Impossible outcomes come back as `-inf`.
pub fn binomial_log_pmf(k: usize, gamma: f64) -> Vec<f64> {
    let ln_g = gamma.ln();
    let ln_1mg = (-gamma).ln_1p();
    (0..=k)
        .map(|l| log_choose_unchecked(k, l) + scaled_ln(l, ln_g) + scaled_ln(k - l, ln_1mg))
        .collect()
}

pub fn binomial_pmf(k: usize, gamma: f64) -> Vec<f64> {
    binomial_log_pmf(k, gamma).into_iter().map(f64::exp).collect()
}

/// Entropy in nats of `Ber(gamma)`.
pub fn binary_entropy(gamma: f64) -> f64 {
    debug_assert!((0.0..=1.0).contains(&gamma));
    let term = |x: f64| if x == 0.0 { 0.0 } else { -x * x.ln() };
    term(gamma) + term(1.0 - gamma)
}

/// Exact entropy of `Bin(k, gamma)` by summation over the pmf.
pub fn binomial_entropy(k: usize, gamma: f64) -> f64 {
    binomial_log_pmf(k, gamma)
        .into_iter()
        .filter(|lp| lp.is_finite())
        .map(|lp| -lp.exp() * lp)
        .sum()
}

/// `k · Hb(γ)`: entropy of the `k` underlying Bernoulli draws.
pub fn binomial_entropy_upper_iid(k: usize, gamma: f64) -> f64 {
    k as f64 * binary_entropy(gamma)
}

/// `½ ln(2πe (kγ(1-γ) + 1/12))`: the continuous-relaxation bound.
pub fn binomial_entropy_upper_gaussian(k: usize, gamma: f64) -> f64 {
    0.5 * (2.0 * PI * E * (k as f64 * gamma * (1.0 - gamma) + 1.0 / 12.0)).ln()
}

/// Brute-force `E_L[½ ln(1 + L βmin²/γ)]` over the binomial pmf.
pub fn expected_half_log_gain(k: usize, gamma: f64, beta_min: f64) -> f64 {
    let snr = beta_min * beta_min / gamma;
    binomial_pmf(k, gamma)
        .into_iter()
        .enumerate()
        .map(|(l, w)| w * 0.5 * (l as f64 * snr).ln_1p())
        .sum()
}

/// Which of the three `γk` cases produced a [`Lemma6Bounds`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Lemma6Case {
    /// `γk > 3`.
    Dense,
    /// `1 < γk <= 3`, treated as constant `τ = γk`.
    Constant { tau: f64 },
    /// `γk <= 1`.
    Sparse,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Lemma6Bounds {
    pub lower: f64,
    pub upper: f64,
    pub case: Lemma6Case,
}

/// Case-matched bracket on `E_L[½ ln(1 + L βmin²/γ)]`.
pub fn lemma6_bounds(k: usize, gamma: f64, beta_min: f64) -> Lemma6Bounds {
    let kb2 = k as f64 * beta_min * beta_min;
    let tau = gamma * k as f64;
    let sparse_gain = (beta_min * beta_min / gamma).ln_1p();
    match classify_regime(k, gamma) {
        Regime::DenseLike => Lemma6Bounds {
            lower: 0.25 * (kb2 / 3.0).ln_1p(),
            upper: 0.5 * kb2.ln_1p(),
            case: Lemma6Case::Dense,
        },
        Regime::Transitional => {
            let gain = (kb2 / tau).ln_1p();
            Lemma6Bounds {
                lower: 0.5 * (-(-tau).exp_m1()) * gain,
                upper: 0.5 * tau * gain,
                case: Lemma6Case::Constant { tau },
            }
        }
        Regime::Degraded => Lemma6Bounds {
            lower: 0.25 * tau * sparse_gain,
            upper: 0.5 * tau * sparse_gain,
            case: Lemma6Case::Sparse,
        },
    }
}
