//! Typed implementations of the subcommands. Each returns a [`Table`]; the
//! argument layer in the parent module only resolves flags and writes output.

use super::render::{Cell, Table};
use crate::bounds::{bound_report, corollary_bounds, dense_threshold, f1, f2, fano_error_lower_a, fano_error_lower_b};
use crate::ensemble::rng::{derive_seed, Purpose};
use crate::ensemble::{
    default_density_grid, monte_carlo_error, oracle_lemma1, oracle_lemma2, oracle_lemma3, oracle_lemma4, Ensemble,
    Restricted,
};
use crate::error::{Error, Result};
use crate::mixture::{
    binomial_entropy, binomial_entropy_upper_gaussian, binomial_entropy_upper_iid, build_psi1, entropy_bracket,
    expected_half_log_gain, lemma6_bounds,
};
use crate::params::{log_choose, ProblemParams};
use serde::Serialize;
use std::str::FromStr;

pub const BOUNDS_COLUMNS: [&str; 17] = [
    "p",
    "k",
    "beta_min",
    "gamma",
    "n",
    "f1",
    "f2",
    "k_minus_1",
    "dense_threshold",
    "g1",
    "g2",
    "sparse_threshold",
    "H_psi1",
    "H_psi2",
    "regime",
    "g1_lower",
    "g2_lower",
];

/// Bound inputs; `n` is optional because no bound depends on it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundsInput {
    pub p: usize,
    pub k: usize,
    pub beta_min: f64,
    pub gamma: f64,
    pub n: Option<usize>,
}

impl BoundsInput {
    pub fn params(&self) -> Result<ProblemParams> {
        ProblemParams::new(self.n.unwrap_or(1), self.p, self.k, self.beta_min, self.gamma)
    }
}

fn ratio_range(numerator: f64, (lo, hi): (f64, f64)) -> Cell {
    Cell::Range(numerator / hi, numerator / lo)
}

fn range_or(point: Option<f64>, range: Option<(f64, f64)>) -> Cell {
    match (point, range) {
        (Some(v), _) => Cell::Num(v),
        (None, Some((lo, hi))) => Cell::Range(lo, hi),
        (None, None) => Cell::Empty,
    }
}

/// One row under [`BOUNDS_COLUMNS`].
pub fn bounds_row(input: &BoundsInput) -> Result<Vec<Cell>> {
    let params = input.params()?;
    let r = bound_report(&params)?;
    let c = r.corollary.expect("full report carries corollary bounds");
    Ok(vec![
        Cell::Int(input.p as u64),
        Cell::Int(input.k as u64),
        Cell::Num(input.beta_min),
        Cell::Num(input.gamma),
        input.n.map_or(Cell::Empty, |n| Cell::Int(n as u64)),
        Cell::Num(r.f1),
        Cell::Num(r.f2),
        Cell::Num(r.k_minus_1),
        Cell::Num(r.dense_threshold),
        range_or(r.g1, r.g1_interval),
        Cell::opt(r.g2),
        range_or(r.sparse_threshold, r.sparse_threshold_interval),
        range_or(r.entropy_psi1, r.entropy_psi1_interval),
        Cell::opt(r.entropy_psi2),
        Cell::text(r.regime.as_str()),
        Cell::Num(c.g1_lower),
        Cell::Num(c.g2_lower),
    ])
}

pub fn cmd_bounds(input: &BoundsInput) -> Result<Table> {
    let mut table = Table::new(BOUNDS_COLUMNS.to_vec());
    table.push(bounds_row(input)?);
    Ok(table)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepVariable {
    Gamma,
    N,
    P,
    BetaMin,
}

impl FromStr for SweepVariable {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "gamma" => Ok(SweepVariable::Gamma),
            "n" => Ok(SweepVariable::N),
            "p" => Ok(SweepVariable::P),
            "beta_min" | "beta-min" => Ok(SweepVariable::BetaMin),
            other => Err(Error::usage(format!("sweep variable must be gamma, n, p or beta_min, got '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Spacing {
    Linear,
    Log,
}

impl FromStr for Spacing {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "linear" => Ok(Spacing::Linear),
            "log" => Ok(Spacing::Log),
            other => Err(Error::usage(format!("spacing must be linear or log, got '{other}'"))),
        }
    }
}

/// `count` points from `start` to `stop` inclusive.
pub fn spaced_values(start: f64, stop: f64, count: usize, spacing: Spacing) -> Result<Vec<f64>> {
    if count == 0 {
        return Err(Error::usage("sweep count must be at least 1"));
    }
    if spacing == Spacing::Log && !(start > 0.0 && stop > 0.0) {
        return Err(Error::usage("log spacing needs positive endpoints"));
    }
    if count == 1 {
        return Ok(vec![start]);
    }
    let step = |i: usize| i as f64 / (count - 1) as f64;
    Ok(match spacing {
        Spacing::Linear => (0..count).map(|i| start + (stop - start) * step(i)).collect(),
        Spacing::Log => {
            let (a, b) = (start.ln(), stop.ln());
            (0..count)
                .map(|i| match i {
                    0 => start,
                    _ if i == count - 1 => stop,
                    _ => (a + (b - a) * step(i)).exp(),
                })
                .collect()
        }
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub variable: SweepVariable,
    pub values: Vec<f64>,
    pub fixed: BoundsInput,
    /// Names of fixed parameters that fell back to the built-in defaults.
    pub defaulted: Vec<&'static str>,
}

/// Fixed parameters used by `sweep` when none are given.
pub const SWEEP_DEFAULT_P: usize = 64;
pub const SWEEP_DEFAULT_K: usize = 8;
pub const SWEEP_DEFAULT_BETA_MIN: f64 = 1.0;

fn as_count(v: f64, name: &str) -> Result<usize> {
    if v >= 1.0 && v.fract() == 0.0 && v < 1e15 {
        Ok(v as usize)
    } else {
        Err(Error::usage(format!("sweep values for {name} must be positive integers, got {v}")))
    }
}

pub fn cmd_sweep(spec: &SweepSpec) -> Result<Table> {
    if spec.values.is_empty() {
        return Err(Error::usage("sweep needs at least one value"));
    }
    let mut columns = BOUNDS_COLUMNS.to_vec();
    columns.push("rate_at_threshold");
    let mut table = Table::new(columns);
    if !spec.defaulted.is_empty() {
        table.note = Some(format!(
            "fixed parameters {} use illustrative defaults (p={SWEEP_DEFAULT_P}, k={SWEEP_DEFAULT_K}, beta_min={SWEEP_DEFAULT_BETA_MIN}) chosen by this tool",
            spec.defaulted.join(",")
        ));
    }
    for &v in &spec.values {
        let mut input = spec.fixed;
        match spec.variable {
            SweepVariable::Gamma => input.gamma = v,
            SweepVariable::BetaMin => input.beta_min = v,
            SweepVariable::N => input.n = Some(as_count(v, "n")?),
            SweepVariable::P => input.p = as_count(v, "p")?,
        }
        let mut row = bounds_row(&input)?;
        let lc = log_choose(input.p, input.k)?;
        let rate = match &row[11] {
            Cell::Num(t) => Cell::Num(lc / t),
            Cell::Range(lo, hi) => ratio_range(lc, (*lo, *hi)),
            _ => Cell::Empty,
        };
        row.push(rate);
        table.push(row);
    }
    Ok(table)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimulateSpec {
    pub params: ProblemParams,
    pub ensemble: Ensemble,
    pub which: Restricted,
    pub trials: usize,
    pub seed: u64,
}

pub const SIMULATE_COLUMNS: [&str; 14] = [
    "p",
    "k",
    "beta_min",
    "gamma",
    "n",
    "ensemble",
    "restricted",
    "trials",
    "errors",
    "p_hat",
    "ci_low",
    "ci_high",
    "fano_lower",
    "seed",
];

pub fn cmd_simulate(spec: &SimulateSpec) -> Result<Table> {
    let r = monte_carlo_error(&spec.params, spec.ensemble, spec.which, spec.trials, spec.seed)?;
    let fano = match spec.which {
        Restricted::A => fano_error_lower_a(&spec.params),
        Restricted::B => fano_error_lower_b(&spec.params),
    };
    let pm = &spec.params;
    let mut table = Table::new(SIMULATE_COLUMNS.to_vec());
    table.push(vec![
        Cell::Int(pm.p as u64),
        Cell::Int(pm.k as u64),
        Cell::Num(pm.beta_min),
        Cell::Num(pm.gamma),
        Cell::Int(pm.n as u64),
        Cell::text(r.ensemble.to_string()),
        Cell::text(r.restricted.to_string()),
        Cell::Int(r.trials as u64),
        Cell::Int(r.errors as u64),
        Cell::Num(r.p_hat),
        Cell::Num(r.ci_low),
        Cell::Num(r.ci_high),
        Cell::Num(fano),
        Cell::Int(r.seed),
    ]);
    Ok(table)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Scope {
    Lemma1,
    Lemma2,
    Lemma3,
    Lemma4,
    Lemma5,
    Lemma6,
    AppendixE,
}

impl Scope {
    pub const ALL: [Scope; 7] =
        [Scope::Lemma1, Scope::Lemma2, Scope::Lemma3, Scope::Lemma4, Scope::Lemma5, Scope::Lemma6, Scope::AppendixE];

    pub fn name(&self) -> &'static str {
        match self {
            Scope::Lemma1 => "lemma1",
            Scope::Lemma2 => "lemma2",
            Scope::Lemma3 => "lemma3",
            Scope::Lemma4 => "lemma4",
            Scope::Lemma5 => "lemma5",
            Scope::Lemma6 => "lemma6",
            Scope::AppendixE => "appendixE",
        }
    }
}

impl FromStr for Scope {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        Scope::ALL
            .into_iter()
            .find(|sc| sc.name() == s)
            .ok_or_else(|| Error::usage(format!("unknown scope '{s}' (expected lemma1..lemma6 or appendixE)")))
    }
}

/// Parses a comma-separated scope list; empty lists are rejected.
pub fn parse_scope(list: &str) -> Result<Vec<Scope>> {
    let mut out: Vec<Scope> =
        list.split(',').filter(|s| !s.trim().is_empty()).map(Scope::from_str).collect::<Result<_>>()?;
    if out.is_empty() {
        return Err(Error::usage("verify-lemmas needs a nonempty scope"));
    }
    out.sort();
    out.dedup();
    Ok(out)
}

pub const VERIFY_COLUMNS: [&str; 7] = ["scope", "check", "setting", "value", "lower", "upper", "pass"];

/// Gamma grid shared by the pmf-based checks.
pub const LEMMA6_GAMMAS: [f64; 15] = [0.01, 0.02, 0.05, 0.1, 0.15, 0.2, 0.25, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0];
pub const LEMMA6_BETAS: [f64; 3] = [0.25, 1.0, 4.0];
pub const LEMMA6_MAX_K: usize = 30;
pub const APPENDIX_E_MAX_K: usize = 100;
pub const LEMMA5_KS: [usize; 4] = [1, 2, 4, 8];
pub const LEMMA5_GAMMAS: [f64; 5] = [0.05, 0.1, 0.25, 0.5, 1.0];
pub const LEMMA5_BETAS: [f64; 3] = [0.25, 1.0, 4.0];
pub const LEMMA5_SLACK: f64 = 1e-6;
pub const ROUNDING_SLACK: f64 = 1e-12;

pub const COVARIANCE_SAMPLES: usize = 200_000;
pub const COVARIANCE_N: usize = 4;
pub const COVARIANCE_TOL: f64 = 0.05;
pub const NULL_COVARIANCE_SAMPLES: usize = 100_000;
pub const NULL_COVARIANCE_TOL: f64 = 0.02;
pub const DENSITY_SAMPLES: usize = 1_000_000;
pub const DENSITY_TOL: f64 = 0.005;
pub const DENSITY_P: usize = 4;

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyReport {
    pub table: Table,
    pub failures: usize,
}

impl VerifyReport {
    pub fn all_pass(&self) -> bool {
        self.failures == 0
    }
}

struct Checks {
    table: Table,
    failures: usize,
}

impl Checks {
    fn add(&mut self, scope: Scope, check: &str, setting: String, value: f64, lower: Option<f64>, upper: Option<f64>) {
        // Several bounds are attained exactly (k = 1, γ = 1), so compare with
        // a rounding-level relative slack.
        let slack = |b: f64| ROUNDING_SLACK * b.abs().max(1.0);
        let ok = lower.is_none_or(|l| l - slack(l) <= value)
            && upper.is_none_or(|u| value <= u + slack(u))
            && value.is_finite();
        if !ok {
            self.failures += 1;
        }
        self.table.push(vec![
            Cell::text(scope.name()),
            Cell::text(check),
            Cell::Text(setting),
            Cell::Num(value),
            Cell::opt(lower),
            Cell::opt(upper),
            Cell::text(if ok { "pass" } else { "fail" }),
        ]);
    }
}

fn covariance_checks(checks: &mut Checks, scope: Scope, seed: u64) -> Result<()> {
    let oracle = match scope {
        Scope::Lemma1 => oracle_lemma1,
        _ => oracle_lemma2,
    };
    let pm = ProblemParams::new(COVARIANCE_N, 6, 2, 1.0, 1.0)?;
    let mut diags: Vec<(Ensemble, Vec<f64>, f64)> = Vec::new();
    for (idx, e) in [Ensemble::StdGaussian, Ensemble::Rademacher, Ensemble::UniformUnitVar].into_iter().enumerate() {
        let r = oracle(&pm, e, COVARIANCE_SAMPLES, derive_seed(seed, idx as u64, Purpose::Oracle))?;
        let setting = format!("ensemble={e};n={};p=6;k=2;beta_min=1;samples={COVARIANCE_SAMPLES}", pm.n);
        checks.add(scope, "diag_reldev", setting.clone(), r.max_diag_reldev, None, Some(COVARIANCE_TOL));
        checks.add(scope, "offdiag_abs", setting.clone(), r.max_offdiag_abs, None, Some(COVARIANCE_TOL));
        let raw_dev = (r.raw_diag - r.predicted_raw_diag).abs() / r.predicted_raw_diag;
        checks.add(scope, "raw_second_moment_reldev", setting, raw_dev, None, Some(COVARIANCE_TOL));
        diags.push((e, (0..pm.n).map(|a| r.empirical[a][a]).collect(), r.predicted_diag));
    }
    let (_, reference, predicted) = &diags[0];
    for (e, d, _) in &diags[1..] {
        let gap = d.iter().zip(reference).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max) / predicted;
        checks.add(scope, "ensemble_agreement", format!("std-gaussian vs {e}"), gap, None, Some(COVARIANCE_TOL));
    }
    let null = ProblemParams::null_signal(COVARIANCE_N, 6, 2, 1.0)?;
    let r = oracle(&null, Ensemble::StdGaussian, NULL_COVARIANCE_SAMPLES, derive_seed(seed, 3, Purpose::Oracle))?;
    checks.add(
        scope,
        "null_signal_diag_reldev",
        format!("ensemble=std-gaussian;beta_min=0;samples={NULL_COVARIANCE_SAMPLES}"),
        r.max_diag_reldev,
        None,
        Some(NULL_COVARIANCE_TOL),
    );
    Ok(())
}

fn density_checks(checks: &mut Checks, scope: Scope, seed: u64) -> Result<()> {
    let grid = default_density_grid();
    let oracle = match scope {
        Scope::Lemma3 => oracle_lemma3,
        _ => oracle_lemma4,
    };
    for (idx, gamma) in [0.5, 1.0].into_iter().enumerate() {
        let pm = ProblemParams::new(1, DENSITY_P, 2, 1.0, gamma)?;
        let r = oracle(&pm, &grid, DENSITY_SAMPLES, derive_seed(seed, idx as u64, Purpose::Oracle))?;
        let setting = format!("p={DENSITY_P};k=2;gamma={gamma};beta_min=1;samples={DENSITY_SAMPLES}");
        checks.add(scope, "max_abs_dev", setting, r.max_abs_dev, None, Some(DENSITY_TOL));
        if scope == Scope::Lemma4 && gamma == 0.5 {
            let at_zero = r.grid.iter().position(|&y| y == 0.0).expect("grid contains 0");
            let v = r.empirical[at_zero];
            checks.add(
                scope,
                "density_at_zero",
                "p=4;k=2;gamma=0.5;beta_min=1".into(),
                v,
                Some(r.predicted[at_zero] - DENSITY_TOL),
                Some(r.predicted[at_zero] + DENSITY_TOL),
            );
        }
    }
    Ok(())
}

fn lemma5_checks(checks: &mut Checks) -> Result<()> {
    for &k in &LEMMA5_KS {
        for &gamma in &LEMMA5_GAMMAS {
            for &beta in &LEMMA5_BETAS {
                let b = entropy_bracket(&build_psi1(k, gamma, beta)?)?;
                checks.add(
                    Scope::Lemma5,
                    "entropy_bracket",
                    format!("k={k};gamma={gamma};beta_min={beta}"),
                    b.numeric,
                    Some(b.lower_conditional - LEMMA5_SLACK),
                    Some(b.upper() + LEMMA5_SLACK),
                );
            }
        }
    }
    Ok(())
}

fn lemma6_checks(checks: &mut Checks) {
    for k in 1..=LEMMA6_MAX_K {
        for &gamma in &LEMMA6_GAMMAS {
            for &beta in &LEMMA6_BETAS {
                let b = lemma6_bounds(k, gamma, beta);
                let e = expected_half_log_gain(k, gamma, beta);
                let case = match b.case {
                    crate::mixture::Lemma6Case::Dense => "dense".to_string(),
                    crate::mixture::Lemma6Case::Constant { tau } => format!("constant(tau={tau})"),
                    crate::mixture::Lemma6Case::Sparse => "sparse".to_string(),
                };
                checks.add(
                    Scope::Lemma6,
                    "expected_gain",
                    format!("k={k};gamma={gamma};beta_min={beta};case={case}"),
                    e,
                    Some(b.lower),
                    Some(b.upper),
                );
            }
        }
    }
}

fn appendix_e_checks(checks: &mut Checks) {
    for k in 1..=APPENDIX_E_MAX_K {
        for &gamma in &LEMMA6_GAMMAS {
            let h = binomial_entropy(k, gamma);
            let setting = format!("k={k};gamma={gamma}");
            checks.add(Scope::AppendixE, "iid_bound", setting.clone(), h, None, Some(binomial_entropy_upper_iid(k, gamma)));
            checks.add(
                Scope::AppendixE,
                "gaussian_bound",
                setting,
                h,
                None,
                Some(binomial_entropy_upper_gaussian(k, gamma)),
            );
        }
    }
}

/// Runs each scope's checks. Per-scope seeds are derived from `seed`, so
/// the rows of one scope do not change when other scopes are added.
pub fn cmd_verify_lemmas(scopes: &[Scope], seed: u64) -> Result<VerifyReport> {
    if scopes.is_empty() {
        return Err(Error::usage("verify-lemmas needs a nonempty scope"));
    }
    let mut checks = Checks { table: Table::new(VERIFY_COLUMNS.to_vec()), failures: 0 };
    for &scope in scopes {
        let scope_seed = derive_seed(seed, scope as u64, Purpose::Oracle);
        match scope {
            Scope::Lemma1 | Scope::Lemma2 => covariance_checks(&mut checks, scope, scope_seed)?,
            Scope::Lemma3 | Scope::Lemma4 => density_checks(&mut checks, scope, scope_seed)?,
            Scope::Lemma5 => lemma5_checks(&mut checks)?,
            Scope::Lemma6 => lemma6_checks(&mut checks),
            Scope::AppendixE => appendix_e_checks(&mut checks),
        }
    }
    Ok(VerifyReport { table: checks.table, failures: checks.failures })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SlopeFamily {
    /// `k = 4`, `βmin² = 1/k`: `f2` against `k ln(p-k)`.
    DenseFixedK,
    /// `k = ⌈p/4⌉`, `βmin² = 1/k`: `f1` against `p ln p`.
    DenseLinearK,
    /// `k = ⌈p/4⌉`, `βmin² = 1/k`: `max{f1, f2, k-1}` against `p ln p`.
    DenseThresholdLinearK,
    /// `k = 4`, `βmin² = 1/k`, `γ = 1/(k ln k)`: the sparse corollary bound
    /// against `k ln(p-k) / (γk ln(1/γ))`.
    SparseFixedK,
}

impl SlopeFamily {
    pub const ALL: [SlopeFamily; 4] = [
        SlopeFamily::DenseFixedK,
        SlopeFamily::DenseLinearK,
        SlopeFamily::DenseThresholdLinearK,
        SlopeFamily::SparseFixedK,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            SlopeFamily::DenseFixedK => "dense-fixed-k",
            SlopeFamily::DenseLinearK => "dense-linear-k",
            SlopeFamily::DenseThresholdLinearK => "dense-threshold-linear-k",
            SlopeFamily::SparseFixedK => "sparse-fixed-k",
        }
    }

    fn labels(&self) -> (&'static str, &'static str) {
        match self {
            SlopeFamily::DenseFixedK => ("k ln(p-k)", "f2"),
            SlopeFamily::DenseLinearK => ("p ln p", "f1"),
            SlopeFamily::DenseThresholdLinearK => ("p ln p", "dense_threshold"),
            SlopeFamily::SparseFixedK => ("k ln(p-k) / (gamma k ln(1/gamma))", "max(g1_lower, g2_lower)"),
        }
    }

    /// `(x, y)` for one dimension `p`.
    pub fn point(&self, p: usize) -> Result<(f64, f64)> {
        let pf = p as f64;
        match self {
            SlopeFamily::DenseFixedK => {
                let k = 4;
                let beta = (1.0 / k as f64).sqrt();
                Ok((k as f64 * ((p - k) as f64).ln(), f2(p, k, beta)?))
            }
            SlopeFamily::DenseLinearK | SlopeFamily::DenseThresholdLinearK => {
                let k = p.div_ceil(4);
                let beta = (1.0 / k as f64).sqrt();
                let y = if *self == SlopeFamily::DenseLinearK {
                    f1(p, k, beta)?
                } else {
                    dense_threshold(&ProblemParams::new(1, p, k, beta, 1.0)?)?.dense_threshold
                };
                Ok((pf * pf.ln(), y))
            }
            SlopeFamily::SparseFixedK => {
                let k = 4usize;
                let kf = k as f64;
                let gamma = 1.0 / (kf * kf.ln());
                let pm = ProblemParams::new(1, p, k, (1.0 / kf).sqrt(), gamma)?;
                let c = corollary_bounds(&pm);
                let x = kf * ((p - k) as f64).ln() / (gamma * kf * (1.0 / gamma).ln());
                Ok((x, c.g1_lower.max(c.g2_lower)))
            }
        }
    }
}

impl FromStr for SlopeFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        SlopeFamily::ALL.into_iter().find(|f| f.name() == s).ok_or_else(|| {
            let names: Vec<&str> = SlopeFamily::ALL.iter().map(|f| f.name()).collect();
            Error::usage(format!("unknown slope family '{s}' (expected one of {})", names.join(", ")))
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SlopeFitReport {
    pub family: String,
    pub x_label: String,
    pub y_label: String,
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub points: Vec<(f64, f64)>,
}

/// Least-squares fit of `ln y = slope · ln x + intercept`.
pub fn fit_log_log(points: &[(f64, f64)]) -> Result<(f64, f64, f64)> {
    if points.len() < 4 {
        return Err(Error::usage(format!("slope fit needs at least 4 points, got {}", points.len())));
    }
    if points.iter().any(|&(x, y)| !(x > 0.0 && y > 0.0)) {
        return Err(Error::domain("log-log fit needs positive coordinates"));
    }
    let logs: Vec<(f64, f64)> = points.iter().map(|&(x, y)| (x.ln(), y.ln())).collect();
    let m = logs.len() as f64;
    let mx = logs.iter().map(|l| l.0).sum::<f64>() / m;
    let my = logs.iter().map(|l| l.1).sum::<f64>() / m;
    let sxx: f64 = logs.iter().map(|l| (l.0 - mx).powi(2)).sum();
    let sxy: f64 = logs.iter().map(|l| (l.0 - mx) * (l.1 - my)).sum();
    let syy: f64 = logs.iter().map(|l| (l.1 - my).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::domain("slope fit needs distinct x values"));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r_squared = if syy == 0.0 { 1.0 } else { (sxy * sxy / (sxx * syy)).clamp(0.0, 1.0) };
    Ok((slope, intercept, r_squared))
}

/// `{64, 128, …, 4096}`.
pub fn default_slope_p_values() -> Vec<usize> {
    (6..=12).map(|e| 1usize << e).collect()
}

pub fn cmd_slopefit(family: SlopeFamily, p_values: &[usize]) -> Result<SlopeFitReport> {
    if p_values.len() < 4 {
        return Err(Error::usage(format!("slopefit needs at least 4 p values, got {}", p_values.len())));
    }
    let points = p_values.iter().map(|&p| family.point(p)).collect::<Result<Vec<_>>>()?;
    let (slope, intercept, r_squared) = fit_log_log(&points)?;
    let (x_label, y_label) = family.labels();
    Ok(SlopeFitReport {
        family: family.name().into(),
        x_label: x_label.into(),
        y_label: y_label.into(),
        slope,
        intercept,
        r_squared,
        points,
    })
}

pub const SLOPEFIT_COLUMNS: [&str; 7] = ["family", "x_label", "y_label", "slope", "intercept", "r_squared", "points"];

pub fn slopefit_table(report: &SlopeFitReport) -> Table {
    let mut table = Table::new(SLOPEFIT_COLUMNS.to_vec());
    table.push(vec![
        Cell::text(&report.family),
        Cell::text(&report.x_label),
        Cell::text(&report.y_label),
        Cell::Num(report.slope),
        Cell::Num(report.intercept),
        Cell::Num(report.r_squared),
        Cell::Int(report.points.len() as u64),
    ]);
    table
}
