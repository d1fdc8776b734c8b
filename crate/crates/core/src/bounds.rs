//! Closed-form necessary conditions on the number of measurements, and the
//! Fano floors on the error probability of any decoder.
//!
//! Thresholds are real-valued; no rounding is applied. A threshold of the
//! form `(numerator)/(denominator)` is evaluated literally, so a negative
//! numerator (tiny problems where `ln C(p,k) < 1`) yields a negative value
//! that the surrounding `max{.., k-1}` then ignores.

use crate::error::{Error, Result};
use crate::mixture::{
    binary_entropy, build_psi1, build_psi2, entropy_bounds, entropy_numeric, noise_entropy, DEFAULT_ENTROPY_TOL,
};
use crate::params::{log_choose_unchecked, ProblemParams};
use serde::Serialize;
use std::f64::consts::{E, PI};

/// Beyond this sparsity, dense-like binomial mixtures are not integrated;
/// their entropy is reported as an analytic bracket instead.
pub const MAX_QUADRATURE_SPARSITY: usize = 10_000;

/// Behaviour of the sparse-ensemble bounds as a function of `γk`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Regime {
    /// `γk > 3`: same order as dense measurements.
    DenseLike,
    /// `1 < γk <= 3`.
    Transitional,
    /// `γk <= 1`: sparsification changes the threshold.
    Degraded,
}

impl Regime {
    pub fn as_str(&self) -> &'static str {
        match self {
            Regime::DenseLike => "DenseLike",
            Regime::Transitional => "Transitional",
            Regime::Degraded => "Degraded",
        }
    }
}

pub fn classify_regime(k: usize, gamma: f64) -> Regime {
    let gk = gamma * k as f64;
    if gk > 3.0 {
        Regime::DenseLike
    } else if gk > 1.0 {
        Regime::Transitional
    } else {
        Regime::Degraded
    }
}

fn check_signal(beta_min: f64) -> Result<()> {
    if beta_min > 0.0 && beta_min.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(format!("bounds need a positive finite beta_min, got {beta_min}")))
    }
}

/// Gaussian-channel bound `ln C(p,k) / (½ ln(1 + ‖β‖²))`.
pub fn gauss_channel_lower(p: usize, k: usize, signal_power: f64) -> Result<f64> {
    if !(signal_power > 0.0) {
        return Err(Error::domain(format!("signal power must be positive, got {signal_power}")));
    }
    if k > p {
        return Err(Error::domain(format!("need k <= p, got k={k}, p={p}")));
    }
    Ok(log_choose_unchecked(p, k) / (0.5 * signal_power.ln_1p()))
}

/// Effective per-measurement variance gain in restricted ensemble A,
/// `½ ln(1 + k βmin² (1 - k/p))`.
pub fn capacity_a(p: usize, k: usize, beta_min: f64) -> f64 {
    let kf = k as f64;
    0.5 * (kf * beta_min * beta_min * (1.0 - kf / p as f64)).ln_1p()
}

/// Restricted ensemble B analogue, `½ ln(1 + βmin² (1 - 1/(p-k+1)))`.
pub fn capacity_b(p: usize, k: usize, beta_min: f64) -> f64 {
    let m = (p - k + 1) as f64;
    0.5 * (beta_min * beta_min * (1.0 - 1.0 / m)).ln_1p()
}

pub fn f1(p: usize, k: usize, beta_min: f64) -> Result<f64> {
    check_signal(beta_min)?;
    if k == 0 || k >= p {
        return Err(Error::domain(format!("f1 needs 1 <= k < p (the bound degenerates at k = p), got k={k}, p={p}")));
    }
    Ok((log_choose_unchecked(p, k) - 1.0) / capacity_a(p, k, beta_min))
}

pub fn f2(p: usize, k: usize, beta_min: f64) -> Result<f64> {
    check_signal(beta_min)?;
    if k == 0 || k >= p {
        return Err(Error::domain(format!(
            "f2 needs p - k + 1 >= 2 (zero-information case at k = p), got k={k}, p={p}"
        )));
    }
    Ok((((p - k + 1) as f64).ln() - 1.0) / capacity_b(p, k, beta_min))
}

/// Evaluated bounds for one parameter point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport {
    pub f1: f64,
    pub f2: f64,
    pub k_minus_1: f64,
    pub dense_threshold: f64,
    pub g1: Option<f64>,
    pub g2: Option<f64>,
    pub sparse_threshold: Option<f64>,
    /// Set instead of `g1` when the mixture entropy is only bracketed.
    pub g1_interval: Option<(f64, f64)>,
    pub sparse_threshold_interval: Option<(f64, f64)>,
    pub regime: Regime,
    pub entropy_psi1: Option<f64>,
    pub entropy_psi2: Option<f64>,
    pub entropy_psi1_interval: Option<(f64, f64)>,
    pub corollary: Option<CorollaryBounds>,
}

/// Dense-ensemble bounds only; sparse fields stay empty.
pub fn dense_threshold(params: &ProblemParams) -> Result<BoundReport> {
    let f1 = f1(params.p, params.k, params.beta_min)?;
    let f2 = f2(params.p, params.k, params.beta_min)?;
    let k_minus_1 = params.k as f64 - 1.0;
    Ok(BoundReport {
        f1,
        f2,
        k_minus_1,
        dense_threshold: f1.max(f2).max(k_minus_1),
        g1: None,
        g2: None,
        sparse_threshold: None,
        g1_interval: None,
        sparse_threshold_interval: None,
        regime: classify_regime(params.k, params.gamma),
        entropy_psi1: None,
        entropy_psi2: None,
        entropy_psi1_interval: None,
        corollary: None,
    })
}

fn entropy_ratio(numerator: f64, entropy: f64) -> Result<f64> {
    let excess = entropy - noise_entropy();
    if !(excess > 0.0) {
        return Err(Error::Numeric {
            message: format!("mixture entropy {entropy} does not exceed the noise entropy"),
            estimate: excess.abs(),
        });
    }
    Ok(numerator / excess)
}

/// `H(ψ̄1)` by quadrature.
pub fn entropy_psi1(params: &ProblemParams, tol: f64) -> Result<f64> {
    check_signal(params.beta_min)?;
    entropy_numeric(&build_psi1(params.k, params.gamma, params.beta_min)?, tol)
}

pub fn entropy_psi2(params: &ProblemParams, tol: f64) -> Result<f64> {
    check_signal(params.beta_min)?;
    entropy_numeric(&build_psi2(params.gamma, params.beta_min)?, tol)
}

pub fn g1(params: &ProblemParams) -> Result<f64> {
    g1_with_entropy(params, entropy_psi1(params, DEFAULT_ENTROPY_TOL)?)
}

pub fn g2(params: &ProblemParams) -> Result<f64> {
    g2_with_entropy(params, entropy_psi2(params, DEFAULT_ENTROPY_TOL)?)
}

/// `g1` given a precomputed `H(ψ̄1)`.
pub fn g1_with_entropy(params: &ProblemParams, entropy: f64) -> Result<f64> {
    entropy_ratio(log_choose_unchecked(params.p, params.k) - 1.0, entropy)
}

pub fn g2_with_entropy(params: &ProblemParams, entropy: f64) -> Result<f64> {
    if params.k >= params.p {
        return Err(Error::domain("g2 needs p - k + 1 >= 2"));
    }
    entropy_ratio((params.reduced_candidates() as f64).ln() - 1.0, entropy)
}

/// Dense and sparse bounds together with the corollary simplifications.
pub fn bound_report(params: &ProblemParams) -> Result<BoundReport> {
    bound_report_with_tol(params, DEFAULT_ENTROPY_TOL)
}

pub fn bound_report_with_tol(params: &ProblemParams, tol: f64) -> Result<BoundReport> {
    let mut report = dense_threshold(params)?;
    let h2 = entropy_psi2(params, tol)?;
    let g2 = g2_with_entropy(params, h2)?;
    report.g2 = Some(g2);
    report.entropy_psi2 = Some(h2);
    report.corollary = Some(corollary_bounds(params));

    if params.k > MAX_QUADRATURE_SPARSITY && report.regime == Regime::DenseLike {
        let (lo, hi) = entropy_bounds(&build_psi1(params.k, params.gamma, params.beta_min)?);
        let numerator = log_choose_unchecked(params.p, params.k) - 1.0;
        let g1_lo = entropy_ratio(numerator, hi)?;
        let g1_hi = entropy_ratio(numerator, lo)?;
        let floor = g2.max(report.k_minus_1);
        report.g1_interval = Some((g1_lo, g1_hi));
        report.entropy_psi1_interval = Some((lo, hi));
        report.sparse_threshold_interval = Some((g1_lo.max(floor), g1_hi.max(floor)));
    } else {
        let h1 = entropy_psi1(params, tol)?;
        let g1 = g1_with_entropy(params, h1)?;
        report.g1 = Some(g1);
        report.entropy_psi1 = Some(h1);
        report.sparse_threshold = Some(g1.max(g2).max(report.k_minus_1));
    }
    Ok(report)
}

/// Which simplified form was used for the headline corollary bounds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum CorollaryCase {
    /// `γk = τ` held constant, used whenever `γk > 1`.
    Constant { tau: f64 },
    /// `γk <= 1`.
    Sparse,
}

/// Closed-form lower bounds on `g1` and `g2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CorollaryBounds {
    /// Headline bound for the regime.
    pub g1_lower: f64,
    pub g2_lower: f64,
    pub case: CorollaryCase,
    /// Mixture variance bound, valid for every `γ`.
    pub general_g1_lower: f64,
    pub general_g2_lower: f64,
}

/// Corollary bounds. Valid as lower bounds whenever the corresponding
/// numerator `ln C(p,k) - 1` or `ln(p-k+1) - 1` is positive.
pub fn corollary_bounds(params: &ProblemParams) -> CorollaryBounds {
    let (p, k, b2, gamma) = (params.p, params.k, params.beta_min * params.beta_min, params.gamma);
    let kf = k as f64;
    let num1 = log_choose_unchecked(p, k) - 1.0;
    let num2 = ((p - k + 1) as f64).ln() - 1.0;
    let tau = gamma * kf;
    let sparse_gain = (b2 / gamma).ln_1p();
    let hb = binary_entropy(gamma);

    let general_g1_lower = num1 / (0.5 * (kf * b2).ln_1p());
    let general_g2_lower = num2 / (0.5 * b2.ln_1p());
    let g2_lower = num2 / (0.5 * gamma * sparse_gain + hb);

    let (g1_lower, case) = if tau <= 1.0 {
        (num1 / (0.5 * tau * sparse_gain + kf * hb), CorollaryCase::Sparse)
    } else {
        let c = 0.5 * (2.0 * PI * E * (tau + 1.0 / 12.0)).ln();
        (num1 / (0.5 * tau * (kf * b2 / tau).ln_1p() + c), CorollaryCase::Constant { tau })
    };
    CorollaryBounds { g1_lower, g2_lower, case, general_g1_lower, general_g2_lower }
}

/// Unclamped Fano expression for restricted ensemble A at a real-valued `n`.
pub fn fano_expression_a(n: f64, p: usize, k: usize, beta_min: f64) -> f64 {
    1.0 - (n * capacity_a(p, k, beta_min) + 1.0) / log_choose_unchecked(p, k)
}

pub fn fano_expression_b(n: f64, p: usize, k: usize, beta_min: f64) -> f64 {
    1.0 - (n * capacity_b(p, k, beta_min) + 1.0) / ((p - k + 1) as f64).ln()
}

fn clamp_probability(x: f64) -> f64 {
    if x.is_nan() {
        0.0
    } else {
        x.clamp(0.0, 1.0)
    }
}

/// Floor on the average error of any decoder for restricted ensemble A
/// over zero-mean unit-variance measurements, clamped to `[0, 1]`.
pub fn fano_error_lower_a(params: &ProblemParams) -> f64 {
    fano_error_lower_a_at(params.n, params.p, params.k, params.beta_min)
}

pub fn fano_error_lower_b(params: &ProblemParams) -> f64 {
    fano_error_lower_b_at(params.n, params.p, params.k, params.beta_min)
}

pub fn fano_error_lower_a_at(n: usize, p: usize, k: usize, beta_min: f64) -> f64 {
    if k >= p || k == 0 {
        return 0.0;
    }
    clamp_probability(fano_expression_a(n as f64, p, k, beta_min))
}

pub fn fano_error_lower_b_at(n: usize, p: usize, k: usize, beta_min: f64) -> f64 {
    if k >= p || k == 0 {
        return 0.0;
    }
    clamp_probability(fano_expression_b(n as f64, p, k, beta_min))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn params(p: usize, k: usize, beta_min: f64, gamma: f64) -> ProblemParams {
        ProblemParams::new(1, p, k, beta_min, gamma).unwrap()
    }

    #[test]
    fn gauss_channel_examples() {
        // ln 6 / (½ ln 3)
        let v = gauss_channel_lower(4, 2, 2.0).unwrap();
        assert_abs_diff_eq!(v, 6f64.ln() / (0.5 * 3f64.ln()), epsilon = 1e-14);
        assert_abs_diff_eq!(v, 3.26186, epsilon = 1e-5);
        assert!(gauss_channel_lower(4, 2, 1e300).unwrap() < 0.01);
        assert!(gauss_channel_lower(4, 2, 0.0).is_err());
    }

    #[test]
    fn dense_examples() {
        assert_abs_diff_eq!(f1(4, 2, 1.0).unwrap(), (6f64.ln() - 1.0) / (0.5 * 2f64.ln()), epsilon = 1e-14);
        // Published to five decimals; the exact value is 2.2845349.
        assert_abs_diff_eq!(f1(4, 2, 1.0).unwrap(), 2.28455, epsilon = 2e-5);
        assert_abs_diff_eq!(f2(4, 2, 1.0).unwrap(), (3f64.ln() - 1.0) / (0.5 * (5.0f64 / 3.0).ln()), epsilon = 1e-14);
        assert_abs_diff_eq!(f2(4, 2, 1.0).unwrap(), 0.38609, epsilon = 1e-5);
        assert!(matches!(f1(4, 4, 1.0), Err(Error::Domain(_))));
        assert!(matches!(f2(4, 4, 1.0), Err(Error::Domain(_))));

        let r = dense_threshold(&params(4, 2, 1.0, 1.0)).unwrap();
        assert_eq!(r.dense_threshold, f1(4, 2, 1.0).unwrap());
        assert!(r.g1.is_none() && r.sparse_threshold.is_none());

        let strong = dense_threshold(&params(4, 2, 1e8, 1.0)).unwrap();
        assert_eq!(strong.dense_threshold, 1.0);

        let weak = params(12, 2, 0.1f64.sqrt(), 1.0);
        let r = dense_threshold(&weak).unwrap();
        assert_abs_diff_eq!(r.f1, (66f64.ln() - 1.0) / (0.5 * (1.0f64 + 0.2 * 10.0 / 12.0).ln()), epsilon = 1e-12);
        assert_abs_diff_eq!(r.f1, 41.38, epsilon = 0.01);
    }

    #[test]
    fn sparse_examples_at_gamma_one() {
        let pm = params(4, 2, 1.0, 1.0);
        assert_abs_diff_eq!(g1(&pm).unwrap(), 1.441383, epsilon = 1e-5);
        assert_abs_diff_eq!(g2(&pm).unwrap(), (3f64.ln() - 1.0) / (0.5 * 2f64.ln()), epsilon = 1e-6);
        assert_abs_diff_eq!(g2(&pm).unwrap(), 0.284536, epsilon = 2e-6);
        // Collapse: g1 equals the general corollary bound.
        let c = corollary_bounds(&pm);
        assert_abs_diff_eq!(g1(&pm).unwrap(), c.general_g1_lower, epsilon = 1e-6);
    }

    #[test]
    fn g1_blows_up_as_signal_vanishes() {
        let mut last = 0.0;
        for &b in &[1.0, 0.1, 0.01] {
            let v = g1(&params(4, 2, b, 0.5)).unwrap();
            assert!(v > last * 10.0);
            last = v;
        }
        assert!(last > 1e3);
    }

    #[test]
    fn corollary_examples() {
        let c = corollary_bounds(&params(4, 2, 1.0, 0.25));
        assert_eq!(c.case, CorollaryCase::Sparse);
        let denom = 0.5 * 0.5 * 5f64.ln() + 2.0 * binary_entropy(0.25);
        assert_abs_diff_eq!(denom, 1.527030, epsilon = 1e-6);
        assert_abs_diff_eq!(c.g1_lower, (6f64.ln() - 1.0) / denom, epsilon = 1e-14);
        assert_abs_diff_eq!(c.g1_lower, 0.518496, epsilon = 1e-6);

        let pm = params(9, 3, 0.7, 0.4);
        let c = corollary_bounds(&pm);
        let f1_no_factor = (log_choose_unchecked(9, 3) - 1.0) / (0.5 * (3.0f64 * 0.49).ln_1p());
        assert_abs_diff_eq!(c.general_g1_lower, f1_no_factor, epsilon = 1e-14);

        let pm = params(4, 2, 1.0, 1.0);
        let c = corollary_bounds(&pm);
        assert_eq!(c.case, CorollaryCase::Constant { tau: 2.0 });
        assert!(c.g1_lower <= g1(&pm).unwrap() + 1e-6);
    }

    #[test]
    fn fano_examples() {
        let pm = ProblemParams::new(20, 12, 2, 0.1f64.sqrt(), 1.0).unwrap();
        let cap = 0.5 * (1.0f64 + 2.0 * 0.1 * (1.0 - 2.0 / 12.0)).ln();
        assert_abs_diff_eq!(cap, 0.077075, epsilon = 1e-6);
        assert_abs_diff_eq!(fano_error_lower_a(&pm), 1.0 - (20.0 * cap + 1.0) / 66f64.ln(), epsilon = 1e-14);
        assert_abs_diff_eq!(fano_error_lower_a(&pm), 0.393385, epsilon = 1e-6);
        assert_eq!(fano_error_lower_a_at(1_000_000, 12, 2, 0.3), 0.0);
        assert_abs_diff_eq!(fano_error_lower_b_at(0, 12, 2, 0.3), 1.0 - 1.0 / 11f64.ln(), epsilon = 1e-15);
        assert_eq!(fano_error_lower_a_at(5, 4, 4, 1.0), 0.0);
    }

    #[test]
    fn fano_vanishes_at_f1() {
        for &(p, k, b) in &[(12usize, 2usize, 0.3f64), (40, 7, 1.1), (1000, 30, 0.05)] {
            let n = f1(p, k, b).unwrap();
            assert!(fano_expression_a(n, p, k, b).abs() <= 1e-12);
            let n = f2(p, k, b).unwrap();
            assert!(fano_expression_b(n, p, k, b).abs() <= 1e-12);
        }
    }

    #[test]
    fn regime_examples() {
        assert_eq!(classify_regime(40, 0.25), Regime::DenseLike);
        assert_eq!(classify_regime(2, 0.25), Regime::Degraded);
        assert_eq!(classify_regime(8, 0.25), Regime::Transitional);
        assert_eq!(classify_regime(12, 0.25), Regime::Transitional);
        assert_eq!(classify_regime(4, 0.25), Regime::Degraded);
    }

    #[test]
    fn full_report_is_consistent() {
        let r = bound_report(&params(4, 2, 1.0, 1.0)).unwrap();
        assert_eq!(r.regime, Regime::Transitional);
        let g1 = r.g1.unwrap();
        let g2 = r.g2.unwrap();
        assert_eq!(r.sparse_threshold.unwrap(), g1.max(g2).max(r.k_minus_1));
        assert_eq!(r.dense_threshold, r.f1.max(r.f2).max(r.k_minus_1));
    }

    #[test]
    fn huge_dense_like_sparsity_is_bracketed() {
        let r = bound_report(&params(40_000, 20_000, 0.1, 0.5)).unwrap();
        assert!(r.g1.is_none() && r.sparse_threshold.is_none());
        let (lo, hi) = r.g1_interval.unwrap();
        assert!(lo <= hi && lo > 0.0);
        let (slo, shi) = r.sparse_threshold_interval.unwrap();
        assert!(slo <= shi);
    }

    #[test]
    fn denominator_ordering_against_channel_bound() {
        for p in 2..40usize {
            for k in 1..p {
                for &b in &[0.1, 1.0, 3.0] {
                    let power = k as f64 * b * b;
                    assert!(capacity_a(p, k, b) < 0.5 * power.ln_1p(), "p={p} k={k} b={b}");
                }
            }
        }
    }

    #[test]
    fn sparse_threshold_monotone_in_gamma_and_beta() {
        let gammas = [0.02, 0.05, 0.1, 0.2, 0.4, 0.7, 1.0];
        let betas = [0.25, 0.5, 1.0, 2.0, 4.0];
        for &(p, k) in &[(16usize, 3usize), (30, 6)] {
            for &b in &betas {
                let t: Vec<f64> = gammas
                    .iter()
                    .map(|&g| bound_report(&params(p, k, b, g)).unwrap().sparse_threshold.unwrap())
                    .collect();
                assert!(t.windows(2).all(|w| w[1] <= w[0] + 1e-6), "p={p} k={k} b={b}: {t:?}");
            }
            for &g in &gammas {
                let rs: Vec<BoundReport> = betas.iter().map(|&b| bound_report(&params(p, k, b, g)).unwrap()).collect();
                assert!(rs.windows(2).all(|w| w[1].dense_threshold <= w[0].dense_threshold));
                assert!(rs
                    .windows(2)
                    .all(|w| w[1].sparse_threshold.unwrap() <= w[0].sparse_threshold.unwrap() + 1e-6));
            }
        }
    }

    #[test]
    fn corollary_lower_bounds_hold_on_grid() {
        for &(p, k) in &[(8usize, 1usize), (12, 2), (20, 4), (30, 8)] {
            for &g in &[0.03, 0.1, 0.25, 0.5, 1.0] {
                for &b in &[0.25, 1.0, 4.0] {
                    let pm = params(p, k, b, g);
                    let r = bound_report(&pm).unwrap();
                    let c = r.corollary.unwrap();
                    let tol = 1e-6;
                    let (g1, g2) = (r.g1.unwrap(), r.g2.unwrap());
                    assert!(c.g1_lower <= g1 + tol, "{pm:?}: {} > {g1}", c.g1_lower);
                    assert!(c.g2_lower <= g2 + tol, "{pm:?}: {} > {g2}", c.g2_lower);
                    assert!(c.general_g1_lower <= g1 + tol);
                    assert!(c.general_g2_lower <= g2 + tol);
                }
            }
        }
    }

    proptest! {
        #[test]
        fn fano_is_a_probability(n in 0usize..10_000, p in 2usize..500, kf in 0.0f64..1.0, b in 0.0f64..10.0) {
            let k = ((p as f64 * kf) as usize).clamp(1, p - 1);
            let a = fano_error_lower_a_at(n, p, k, b);
            let bb = fano_error_lower_b_at(n, p, k, b);
            prop_assert!((0.0..=1.0).contains(&a));
            prop_assert!((0.0..=1.0).contains(&bb));
        }
    }
}
