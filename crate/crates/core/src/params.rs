//! Problem parameters, combinatorics over supports, and sparse signals.
//!
//! Everything here is in nats and uses 0-based indices. The noise variance
//! is pinned to one; any other value is rejected.

use crate::error::{Error, Result};
use serde::Serialize;
use statrs::function::gamma::ln_gamma;

/// Largest number of subsets [`enumerate_supports`] will materialise by default.
pub const DEFAULT_ENUMERATION_CAP: usize = 1_000_000;

/// Below this value of `min(k, p - k)` the log binomial coefficient is summed
/// term by term; above it the log-gamma route is already accurate.
const DIRECT_SUM_LIMIT: usize = 1_000;

/// The tuple `(n, p, k, beta_min, gamma)` with unit noise variance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProblemParams {
    pub n: usize,
    pub p: usize,
    pub k: usize,
    pub beta_min: f64,
    pub gamma: f64,
    noise_var: f64,
}

impl ProblemParams {
    pub fn new(n: usize, p: usize, k: usize, beta_min: f64, gamma: f64) -> Result<Self> {
        if !(beta_min > 0.0) || !beta_min.is_finite() {
            return Err(Error::domain(format!("beta_min must be positive and finite, got {beta_min}")));
        }
        Self::build(n, p, k, beta_min, gamma)
    }

    /// Parameters with `beta_min = 0`: observations are pure noise. Only the
    /// simulation layer accepts these, as a chance-level control; every
    /// closed-form bound rejects them.
    pub fn null_signal(n: usize, p: usize, k: usize, gamma: f64) -> Result<Self> {
        Self::build(n, p, k, 0.0, gamma)
    }

    /// Like [`ProblemParams::new`] but with an explicit noise variance, which
    /// must equal one.
    pub fn with_noise_var(
        n: usize,
        p: usize,
        k: usize,
        beta_min: f64,
        gamma: f64,
        noise_var: f64,
    ) -> Result<Self> {
        if noise_var != 1.0 {
            return Err(Error::domain(format!(
                "noise variance is fixed at 1 (rescale beta_min instead), got {noise_var}"
            )));
        }
        Self::new(n, p, k, beta_min, gamma)
    }

    fn build(n: usize, p: usize, k: usize, beta_min: f64, gamma: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::domain("n must be at least 1"));
        }
        if k == 0 || k > p {
            return Err(Error::domain(format!("need 1 <= k <= p, got k={k}, p={p}")));
        }
        if !(gamma > 0.0 && gamma <= 1.0) {
            return Err(Error::domain(format!("gamma must lie in (0, 1], got {gamma}")));
        }
        Ok(Self { n, p, k, beta_min, gamma, noise_var: 1.0 })
    }

    pub fn noise_var(&self) -> f64 {
        self.noise_var
    }

    pub fn with_n(self, n: usize) -> Result<Self> {
        Self::build(n, self.p, self.k, self.beta_min, self.gamma)
    }

    /// Number of candidate positions in restricted ensemble B.
    pub fn reduced_candidates(&self) -> usize {
        self.p - self.k + 1
    }
}

/// `ln C(p, k)`.
pub fn log_choose(p: usize, k: usize) -> Result<f64> {
    if k > p {
        return Err(Error::domain(format!("log_choose needs k <= p, got k={k}, p={p}")));
    }
    Ok(log_choose_unchecked(p, k))
}

pub(crate) fn log_choose_unchecked(p: usize, k: usize) -> f64 {
    let m = k.min(p - k);
    if m == 0 {
        return 0.0;
    }
    if m <= DIRECT_SUM_LIMIT {
        let base = (p - m) as f64;
        (1..=m).map(|i| ((base + i as f64) / i as f64).ln()).sum()
    } else {
        ln_gamma(p as f64 + 1.0) - ln_gamma(k as f64 + 1.0) - ln_gamma((p - k) as f64 + 1.0)
    }
}

/// Rate `ln C(p, k) / n` in nats per measurement.
pub fn rate(n: usize, p: usize, k: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::domain("rate needs n >= 1"));
    }
    Ok(log_choose(p, k)? / n as f64)
}

/// Exact `C(p, k)` when it fits in a `u128`.
pub fn choose_exact(p: usize, k: usize) -> Option<u128> {
    if k > p {
        return Some(0);
    }
    let m = k.min(p - k);
    let mut acc: u128 = 1;
    for i in 1..=m as u128 {
        acc = acc.checked_mul(p as u128 - m as u128 + i)? / i;
    }
    Some(acc)
}

/// Number of k-subsets of `{0..p}` if it does not exceed `cap`.
pub fn enumeration_size(p: usize, k: usize, cap: usize) -> Result<usize> {
    if k > p {
        return Err(Error::domain(format!("need k <= p, got k={k}, p={p}")));
    }
    match choose_exact(p, k) {
        Some(count) if count <= cap as u128 => Ok(count as usize),
        _ => Err(Error::Capacity { p, k, count: log_choose_unchecked(p, k).exp(), cap }),
    }
}

/// A sorted set of `k` distinct column indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct SupportSet {
    indices: Vec<usize>,
}

impl SupportSet {
    /// Validates that `indices` is strictly increasing and bounded by `p`.
    pub fn new(indices: Vec<usize>, p: usize) -> Result<Self> {
        if indices.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::domain(format!("support indices must be strictly increasing: {indices:?}")));
        }
        if let Some(&last) = indices.last() {
            if last >= p {
                return Err(Error::domain(format!("support index {last} out of range for p={p}")));
            }
        }
        Ok(Self { indices })
    }

    pub fn from_unsorted(mut indices: Vec<usize>, p: usize) -> Result<Self> {
        indices.sort_unstable();
        Self::new(indices, p)
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn size(&self) -> usize {
        self.indices.len()
    }

    pub fn contains(&self, j: usize) -> bool {
        self.indices.binary_search(&j).is_ok()
    }
}

/// Lexicographic walk over all k-subsets of `{0..p}` without materialising them.
#[derive(Debug, Clone)]
pub struct Combinations {
    p: usize,
    current: Vec<usize>,
    done: bool,
}

impl Combinations {
    pub fn new(p: usize, k: usize) -> Self {
        Self { p, current: (0..k).collect(), done: k > p }
    }

    /// Current subset, or `None` once exhausted.
    pub fn current(&self) -> Option<&[usize]> {
        (!self.done).then_some(self.current.as_slice())
    }

    /// Moves to the lexicographic successor.
    pub fn advance(&mut self) {
        let k = self.current.len();
        let mut i = k;
        while i > 0 {
            i -= 1;
            if self.current[i] < self.p - k + i {
                self.current[i] += 1;
                for j in i + 1..k {
                    self.current[j] = self.current[j - 1] + 1;
                }
                return;
            }
        }
        self.done = true;
    }
}

impl Iterator for Combinations {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let out = self.current()?.to_vec();
        self.advance();
        Some(out)
    }
}

/// All k-subsets of `{0..p}` in lexicographic order, subject to the default cap.
pub fn enumerate_supports(p: usize, k: usize) -> Result<Vec<SupportSet>> {
    enumerate_supports_capped(p, k, DEFAULT_ENUMERATION_CAP)
}

pub fn enumerate_supports_capped(p: usize, k: usize, cap: usize) -> Result<Vec<SupportSet>> {
    let count = enumeration_size(p, k, cap)?;
    let mut out = Vec::with_capacity(count);
    out.extend(Combinations::new(p, k).map(|indices| SupportSet { indices }));
    Ok(out)
}

/// A k-sparse vector stored as sorted `(index, value)` pairs.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SparseSignal {
    dimension: usize,
    entries: Vec<(usize, f64)>,
}

impl SparseSignal {
    pub fn new(dimension: usize, mut entries: Vec<(usize, f64)>) -> Result<Self> {
        entries.retain(|&(_, v)| v != 0.0);
        entries.sort_by_key(|&(i, _)| i);
        if entries.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(Error::domain("duplicate signal index"));
        }
        if entries.last().is_some_and(|&(i, _)| i >= dimension) {
            return Err(Error::domain("signal index out of range"));
        }
        Ok(Self { dimension, entries })
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn entries(&self) -> &[(usize, f64)] {
        &self.entries
    }

    pub fn sparsity(&self) -> usize {
        self.entries.len()
    }

    pub fn support(&self) -> SupportSet {
        SupportSet { indices: self.entries.iter().map(|&(i, _)| i).collect() }
    }

    /// Membership in the class of signals whose nonzeros all have magnitude
    /// at least `beta_min`.
    pub fn in_class(&self, beta_min: f64) -> bool {
        self.entries.iter().all(|&(_, v)| v.abs() >= beta_min)
    }

    pub fn squared_norm(&self) -> f64 {
        self.entries.iter().map(|&(_, v)| v * v).sum()
    }

    pub fn to_dense(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.dimension];
        for &(i, v) in &self.entries {
            out[i] = v;
        }
        out
    }
}

/// Signal equal to `beta_min` on `support` and zero elsewhere.
pub fn make_constant_signal(support: &SupportSet, beta_min: f64, p: usize) -> Result<SparseSignal> {
    if support.indices.last().is_some_and(|&i| i >= p) {
        return Err(Error::domain(format!("support does not fit dimension p={p}")));
    }
    Ok(SparseSignal {
        dimension: p,
        entries: support.indices.iter().map(|&i| (i, beta_min)).collect(),
    })
}

/// A length-n observation vector.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ObservationVector {
    pub values: Vec<f64>,
    pub noise_realized: bool,
}

impl ObservationVector {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn log_choose_small_cases() {
        assert!((log_choose(4, 2).unwrap() - 6f64.ln()).abs() < 1e-15);
        assert_eq!(log_choose(9, 0).unwrap(), 0.0);
        assert_eq!(log_choose(9, 9).unwrap(), 0.0);
        // 12 * 11 / 2 = 66
        assert!((log_choose(12, 2).unwrap() - 66f64.ln()).abs() < 1e-14);
        assert!((log_choose(12, 2).unwrap() - 4.189655).abs() < 1e-6);
    }

    #[test]
    fn log_choose_rejects_k_above_p() {
        assert!(matches!(log_choose(3, 4), Err(Error::Domain(_))));
    }

    #[test]
    fn log_choose_matches_exact_counts_and_large_p() {
        for p in 0..=60usize {
            for k in 0..=p {
                let exact = choose_exact(p, k).unwrap() as f64;
                let got = log_choose(p, k).unwrap();
                assert!((got - exact.ln()).abs() <= 1e-12 * exact.ln().max(1.0), "p={p} k={k}");
            }
        }
        // Both routes agree where they meet.
        let p = 1_000_000;
        let direct = log_choose(p, DIRECT_SUM_LIMIT).unwrap();
        let gamma_route = ln_gamma(p as f64 + 1.0)
            - ln_gamma(DIRECT_SUM_LIMIT as f64 + 1.0)
            - ln_gamma((p - DIRECT_SUM_LIMIT) as f64 + 1.0);
        assert!((direct - gamma_route).abs() / direct < 1e-12);
    }

    #[test]
    fn rate_examples() {
        assert!((rate(10, 4, 2).unwrap() - 0.1791759).abs() < 1e-7);
        assert_eq!(rate(7, 5, 5).unwrap(), 0.0);
        assert!((rate(1, 12, 2).unwrap() - 4.189655).abs() < 1e-6);
        assert!(rate(0, 4, 2).is_err());
    }

    #[test]
    fn enumerate_examples() {
        let sets = enumerate_supports(3, 2).unwrap();
        let raw: Vec<_> = sets.iter().map(|s| s.indices().to_vec()).collect();
        assert_eq!(raw, vec![vec![0, 1], vec![0, 2], vec![1, 2]]);

        let all = enumerate_supports(4, 4).unwrap();
        assert_eq!(all.len(), 1);
        assert_eq!(all[0].indices(), &[0, 1, 2, 3]);

        let five = enumerate_supports(5, 2).unwrap();
        assert_eq!(five.len(), 10);
        assert_eq!(five[0].indices(), &[0, 1]);
        assert_eq!(five[9].indices(), &[3, 4]);
        assert!(five.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn enumerate_cap_reports_count() {
        let err = enumerate_supports(40, 20).unwrap_err();
        match err {
            Error::Capacity { p, k, count, cap } => {
                assert_eq!((p, k, cap), (40, 20, DEFAULT_ENUMERATION_CAP));
                assert!((count / 137_846_528_820.0 - 1.0).abs() < 1e-9);
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(enumerate_supports_capped(5, 2, 9).is_err());
        assert_eq!(enumerate_supports_capped(5, 2, 10).unwrap().len(), 10);
    }

    #[test]
    fn enumeration_count_matches_log_choose() {
        for p in 0..=20 {
            for k in 0..=p {
                let n = enumerate_supports(p, k).unwrap().len();
                assert_eq!(n as f64, log_choose(p, k).unwrap().exp().round(), "p={p} k={k}");
            }
        }
    }

    #[test]
    fn constant_signal_examples() {
        let s = SupportSet::new(vec![0, 2], 4).unwrap();
        let sig = make_constant_signal(&s, 1.0, 4).unwrap();
        assert_eq!(sig.to_dense(), vec![1.0, 0.0, 1.0, 0.0]);
        assert_eq!(sig.support(), s);

        let s = SupportSet::new(vec![1], 3).unwrap();
        let sig = make_constant_signal(&s, 0.5, 3).unwrap();
        assert_eq!(sig.to_dense(), vec![0.0, 0.5, 0.0]);
        assert!(sig.in_class(0.5));
        assert!(!sig.in_class(0.6));
        assert_eq!(sig.sparsity(), 1);
    }

    #[test]
    fn support_validation() {
        assert!(SupportSet::new(vec![1, 1], 4).is_err());
        assert!(SupportSet::new(vec![2, 1], 4).is_err());
        assert!(SupportSet::new(vec![0, 4], 4).is_err());
        assert_eq!(SupportSet::from_unsorted(vec![3, 0], 4).unwrap().indices(), &[0, 3]);
    }

    #[test]
    fn params_validation() {
        assert!(ProblemParams::new(10, 4, 2, 1.0, 1.0).is_ok());
        assert!(ProblemParams::new(0, 4, 2, 1.0, 1.0).is_err());
        assert!(ProblemParams::new(10, 4, 5, 1.0, 1.0).is_err());
        assert!(ProblemParams::new(10, 4, 0, 1.0, 1.0).is_err());
        assert!(ProblemParams::new(10, 4, 2, 0.0, 1.0).is_err());
        assert!(ProblemParams::new(10, 4, 2, 1.0, 0.0).is_err());
        assert!(ProblemParams::new(10, 4, 2, 1.0, 1.5).is_err());
        assert!(ProblemParams::with_noise_var(10, 4, 2, 1.0, 1.0, 2.0).is_err());
        let ok = ProblemParams::with_noise_var(10, 4, 2, 1.0, 1.0, 1.0).unwrap();
        assert_eq!(ok.noise_var(), 1.0);
        assert_eq!(ProblemParams::null_signal(5, 4, 2, 1.0).unwrap().beta_min, 0.0);
    }

    proptest! {
        #[test]
        fn log_choose_symmetric(p in 0usize..5000, frac in 0.0f64..=1.0) {
            let k = ((p as f64) * frac).round() as usize;
            let a = log_choose(p, k).unwrap();
            let b = log_choose(p, p - k).unwrap();
            prop_assert!((a - b).abs() <= 1e-12 * a.abs().max(1.0));
        }

        #[test]
        fn rate_decreases_in_n(p in 2usize..200, n in 1usize..1000, kf in 0.01f64..0.99) {
            let k = ((p as f64 * kf).round() as usize).clamp(1, p - 1);
            prop_assert!(rate(n + 1, p, k).unwrap() < rate(n, p, k).unwrap());
        }
    }
}
