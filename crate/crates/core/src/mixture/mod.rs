//! Zero-mean Gaussian scale mixtures describing a single averaged
//! observation under sparsified measurements, and their differential
//! entropies.
//!
//! Two families matter. The binomial family has one component per label
//! `ℓ = 0..=k`, with weight `C(k,ℓ) γ^ℓ (1-γ)^(k-ℓ)` and variance
//! `1 + ℓ βmin²/γ`. The Bernoulli family is the `k = 1` member. Every
//! component variance is at least the unit noise floor.
//!
//! Entropies are computed by adaptive quadrature of `-ψ ln ψ` on the half
//! line, doubled by symmetry, with a cutoff chosen from a rigorous bound on
//! the neglected tail.

pub mod binomial;
pub mod quadrature;

pub use binomial::{
    binary_entropy, binomial_entropy, binomial_entropy_upper_gaussian, binomial_entropy_upper_iid,
    binomial_log_pmf, binomial_pmf, expected_half_log_gain, lemma6_bounds, Lemma6Bounds, Lemma6Case,
};

use crate::error::{Error, Result};
use quadrature::{integrate, Quadrature, DEFAULT_MAX_INTERVALS};
use serde::Serialize;
use statrs::function::erf::erfc;
use std::f64::consts::{E, FRAC_1_SQRT_2, PI};

/// Default absolute tolerance for [`entropy_numeric`].
pub const DEFAULT_ENTROPY_TOL: f64 = 1e-8;

/// Differential entropy of the unit-variance noise, `½ ln(2πe)`.
pub fn noise_entropy() -> f64 {
    gaussian_entropy(1.0)
}

pub fn gaussian_entropy(variance: f64) -> f64 {
    0.5 * (2.0 * PI * E * variance).ln()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MixtureComponent {
    pub weight: f64,
    pub variance: f64,
}

/// Distribution of the latent mixture label.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum LabelKind {
    Binomial { k: usize, gamma: f64 },
    Bernoulli { gamma: f64 },
    /// No label information (a hand-built mixture or a single Gaussian).
    Degenerate,
}

impl LabelKind {
    /// Entropy of the label in nats.
    pub fn entropy(&self) -> f64 {
        match *self {
            LabelKind::Binomial { k, gamma } => binomial_entropy(k, gamma),
            LabelKind::Bernoulli { gamma } => binary_entropy(gamma),
            LabelKind::Degenerate => 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GaussianMixtureSpec {
    components: Vec<MixtureComponent>,
    label: LabelKind,
}

impl GaussianMixtureSpec {
    /// Checks that weights lie in `[0,1]` and sum to one within `1e-12`, and
    /// that every variance is at least one. Zero-weight components are dropped.
    pub fn new(components: Vec<MixtureComponent>, label: LabelKind) -> Result<Self> {
        if components.iter().any(|c| !(0.0..=1.0).contains(&c.weight)) {
            return Err(Error::domain("mixture weights must lie in [0, 1]"));
        }
        if components.iter().any(|c| !(c.variance >= 1.0) || !c.variance.is_finite()) {
            return Err(Error::domain("mixture variances must be finite and at least the noise floor 1"));
        }
        let total: f64 = components.iter().map(|c| c.weight).sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::domain(format!("mixture weights sum to {total}, not 1")));
        }
        let components = components.into_iter().filter(|c| c.weight > 0.0).collect();
        Ok(Self { components, label })
    }

    /// A single Gaussian.
    pub fn gaussian(variance: f64) -> Result<Self> {
        Self::new(vec![MixtureComponent { weight: 1.0, variance }], LabelKind::Degenerate)
    }

    pub fn components(&self) -> &[MixtureComponent] {
        &self.components
    }

    pub fn label(&self) -> LabelKind {
        self.label
    }

    pub fn variance(&self) -> f64 {
        self.components.iter().map(|c| c.weight * c.variance).sum()
    }

    fn max_variance_component(&self) -> MixtureComponent {
        *self
            .components
            .iter()
            .max_by(|a, b| a.variance.total_cmp(&b.variance))
            .expect("mixture has at least one component")
    }

    fn log_density_terms(&self) -> Vec<(f64, f64)> {
        self.components
            .iter()
            .map(|c| (c.weight.ln() - 0.5 * (2.0 * PI * c.variance).ln(), 0.5 / c.variance))
            .collect()
    }
}

/// Binomial-label mixture over `ℓ = 0..=k`. With `k = 1` this is exactly
/// [`build_psi2`], label kind included.
pub fn build_psi1(k: usize, gamma: f64, beta_min: f64) -> Result<GaussianMixtureSpec> {
    if k == 0 {
        return Err(Error::domain("psi1 needs k >= 1"));
    }
    if !(gamma > 0.0 && gamma <= 1.0) {
        return Err(Error::domain(format!("gamma must lie in (0, 1], got {gamma}")));
    }
    if !(beta_min >= 0.0) || !beta_min.is_finite() {
        return Err(Error::domain(format!("beta_min must be finite and non-negative, got {beta_min}")));
    }
    let snr = beta_min * beta_min / gamma;
    let components = binomial_pmf(k, gamma)
        .into_iter()
        .enumerate()
        .map(|(l, weight)| MixtureComponent { weight, variance: 1.0 + l as f64 * snr })
        .collect::<Vec<_>>();
    let label = if k == 1 { LabelKind::Bernoulli { gamma } } else { LabelKind::Binomial { k, gamma } };
    // Log-space weights can drift from unit sum by a few ulps; normalise.
    let total: f64 = components.iter().map(|c| c.weight).sum();
    let components = components
        .into_iter()
        .map(|c| MixtureComponent { weight: c.weight / total, ..c })
        .collect();
    GaussianMixtureSpec::new(components, label)
}

/// Bernoulli-label mixture `γ N(0, 1 + βmin²/γ) + (1-γ) N(0, 1)`.
pub fn build_psi2(gamma: f64, beta_min: f64) -> Result<GaussianMixtureSpec> {
    build_psi1(1, gamma, beta_min)
}

/// Mixture density at `y`.
pub fn density(spec: &GaussianMixtureSpec, y: f64) -> f64 {
    spec.components
        .iter()
        .map(|c| c.weight * (-0.5 * y * y / c.variance).exp() / (2.0 * PI * c.variance).sqrt())
        .sum()
}

fn log_density(terms: &[(f64, f64)], y: f64) -> f64 {
    let y2 = y * y;
    let max = terms.iter().map(|&(c, h)| c - h * y2).fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    max + terms.iter().map(|&(c, h)| (c - h * y2 - max).exp()).sum::<f64>().ln()
}

fn upper_tail(z: f64) -> f64 {
    0.5 * erfc(z * FRAC_1_SQRT_2)
}

/// Upper bound on `∫_{|y| > cut} -ψ ln ψ`.
///
/// Uses `-ln ψ(y) <= -ln w* + ½ ln(2π v*) + y²/(2 v*)` for the widest
/// component `(w*, v*)` and the second moment of each Gaussian tail.
fn entropy_tail_bound(spec: &GaussianMixtureSpec, cut: f64) -> f64 {
    let widest = spec.max_variance_component();
    let offset = (0.5 * (2.0 * PI * widest.variance).ln() - widest.weight.ln()).max(0.0);
    let one_side: f64 = spec
        .components
        .iter()
        .map(|c| {
            let z = cut / c.variance.sqrt();
            let q = upper_tail(z);
            let phi = (-0.5 * z * z).exp() / (2.0 * PI).sqrt();
            c.weight * (offset * q + 0.5 * (z * phi + q))
        })
        .sum();
    2.0 * one_side
}

/// Smallest cutoff (on a 5% geometric ladder) whose neglected two-sided tail
/// is below `budget`.
fn entropy_cutoff(spec: &GaussianMixtureSpec, budget: f64) -> f64 {
    let mut cut = 2.0 * spec.max_variance_component().variance.sqrt();
    while entropy_tail_bound(spec, cut) >= budget {
        cut *= 1.05;
    }
    cut
}

/// Quadrature diagnostics for an entropy evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EntropyEstimate {
    pub value: f64,
    /// Quadrature error estimate plus the neglected tail bound.
    pub error_bound: f64,
    pub cutoff: f64,
    pub intervals: usize,
}

/// `-∫ ψ ln ψ` with absolute error at most `tol`.
pub fn entropy_numeric(spec: &GaussianMixtureSpec, tol: f64) -> Result<f64> {
    entropy_estimate(spec, tol).map(|e| e.value)
}

pub fn entropy_estimate(spec: &GaussianMixtureSpec, tol: f64) -> Result<EntropyEstimate> {
    if !(tol > 0.0) {
        return Err(Error::domain("entropy tolerance must be positive"));
    }
    let tail_budget = tol / 10.0;
    let cutoff = entropy_cutoff(spec, tail_budget);
    let terms = spec.log_density_terms();
    let integrand = |y: f64| {
        let ln_psi = log_density(&terms, y);
        if ln_psi == f64::NEG_INFINITY {
            0.0
        } else {
            -ln_psi.exp() * ln_psi
        }
    };
    // Geometric initial partition resolves both the unit-variance core and
    // wide components.
    let mut breaks = vec![0.0];
    let mut edge = 0.5;
    while edge < cutoff {
        breaks.push(edge);
        edge *= 2.0;
    }
    breaks.push(cutoff);
    let Quadrature { value, error_estimate, intervals, .. } =
        integrate(integrand, &breaks, 0.4 * tol, DEFAULT_MAX_INTERVALS)?;
    Ok(EntropyEstimate {
        value: 2.0 * value,
        error_bound: 2.0 * error_estimate + tail_budget,
        cutoff,
        intervals,
    })
}

/// Analytic sandwich around a mixture entropy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EntropyBracket {
    pub numeric: f64,
    /// Gaussian with the mixture's variance.
    pub upper_variance: f64,
    /// Conditional entropy plus the label entropy.
    pub upper_lemma5: f64,
    /// Entropy conditional on the label.
    pub lower_conditional: f64,
}

impl EntropyBracket {
    pub fn upper(&self) -> f64 {
        self.upper_variance.min(self.upper_lemma5)
    }

    /// `lower - slack <= numeric <= upper + slack`.
    pub fn contains_numeric(&self, slack: f64) -> bool {
        self.lower_conditional - slack <= self.numeric && self.numeric <= self.upper() + slack
    }
}

/// Lower and upper analytic entropy bounds for `spec`, without quadrature.
pub fn entropy_bounds(spec: &GaussianMixtureSpec) -> (f64, f64) {
    let lower: f64 = spec.components.iter().map(|c| c.weight * gaussian_entropy(c.variance)).sum();
    let upper = (lower + spec.label.entropy()).min(gaussian_entropy(spec.variance()));
    (lower, upper)
}

pub fn entropy_bracket(spec: &GaussianMixtureSpec) -> Result<EntropyBracket> {
    entropy_bracket_with_tol(spec, DEFAULT_ENTROPY_TOL)
}

pub fn entropy_bracket_with_tol(spec: &GaussianMixtureSpec, tol: f64) -> Result<EntropyBracket> {
    let lower_conditional: f64 = spec.components.iter().map(|c| c.weight * gaussian_entropy(c.variance)).sum();
    Ok(EntropyBracket {
        numeric: entropy_numeric(spec, tol)?,
        upper_variance: gaussian_entropy(spec.variance()),
        upper_lemma5: lower_conditional + spec.label.entropy(),
        lower_conditional,
    })
}
