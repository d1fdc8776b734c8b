//! Command-line surface. Values come from flags, then the `--config` file,
//! then built-in defaults.

pub mod commands;
pub mod config;
pub mod render;

use crate::ensemble::{Ensemble, Restricted};
use crate::error::{Error, Result};
use crate::params::ProblemParams;
use clap::{Args, Parser, Subcommand};
use commands::*;
use config::Config;
use render::Table;
use std::path::PathBuf;

#[derive(Debug, Parser)]
#[command(name = "recovery-limits", version, about = "Sample-size limits for sparse support recovery")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

impl Cli {
    pub fn command_name(&self) -> &'static str {
        match self.command {
            Command::Bounds { .. } => "bounds",
            Command::Sweep { .. } => "sweep",
            Command::Simulate { .. } => "simulate",
            Command::VerifyLemmas { .. } => "verify-lemmas",
            Command::Slopefit { .. } => "slopefit",
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate dense and sparse necessary conditions at one point.
    Bounds {
        #[command(flatten)]
        params: ParamArgs,
        #[command(flatten)]
        io: IoArgs,
    },
    /// Evaluate bounds over a range of one parameter.
    Sweep {
        #[command(flatten)]
        params: ParamArgs,
        #[command(flatten)]
        sweep: SweepArgs,
        #[command(flatten)]
        io: IoArgs,
    },
    /// Monte Carlo error of the exhaustive ML decoder.
    Simulate {
        #[command(flatten)]
        params: ParamArgs,
        #[command(flatten)]
        sim: SimArgs,
        #[command(flatten)]
        io: IoArgs,
    },
    /// Run the oracle checks; exits 1 if any check fails.
    VerifyLemmas {
        /// Comma-separated subset of lemma1..lemma6, appendixE.
        #[arg(long)]
        scope: Option<String>,
        #[arg(long)]
        seed: Option<u64>,
        #[command(flatten)]
        io: IoArgs,
    },
    /// Log-log growth fit of a threshold against its predicted scaling.
    Slopefit {
        #[arg(long)]
        family: Option<String>,
        /// Comma-separated dimensions, at least four.
        #[arg(long = "p-values")]
        p_values: Option<String>,
        #[command(flatten)]
        io: IoArgs,
    },
}

#[derive(Debug, Default, Clone, Args)]
pub struct ParamArgs {
    #[arg(long)]
    pub p: Option<usize>,
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long = "beta-min")]
    pub beta_min: Option<f64>,
    #[arg(long = "beta-min-sq")]
    pub beta_min_sq: Option<f64>,
    #[arg(long)]
    pub gamma: Option<f64>,
    #[arg(long)]
    pub n: Option<usize>,
}

#[derive(Debug, Default, Clone, Args)]
pub struct IoArgs {
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// csv (default) or json.
    #[arg(long)]
    pub format: Option<String>,
}

#[derive(Debug, Default, Clone, Args)]
pub struct SweepArgs {
    /// gamma, n, p or beta_min.
    #[arg(long)]
    pub variable: Option<String>,
    /// Comma-separated explicit values.
    #[arg(long, allow_hyphen_values = true)]
    pub values: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub start: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub stop: Option<f64>,
    #[arg(long)]
    pub count: Option<usize>,
    /// linear (default) or log.
    #[arg(long)]
    pub spacing: Option<String>,
}

#[derive(Debug, Default, Clone, Args)]
pub struct SimArgs {
    #[arg(long)]
    pub trials: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// std-gaussian, rademacher, uniform or sparsified.
    #[arg(long)]
    pub ensemble: Option<String>,
    /// A or B.
    #[arg(long)]
    pub restricted: Option<String>,
}

pub const DEFAULT_TRIALS: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl std::str::FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(Error::usage(format!("format must be csv or json, got '{other}'"))),
        }
    }
}

fn load_config(io: &IoArgs) -> Result<Config> {
    io.config.as_deref().map_or_else(|| Ok(Config::default()), Config::load)
}

impl ParamArgs {
    fn fill(&mut self, cfg: &Config) -> Result<()> {
        cfg.fill(&mut self.p, "p")?;
        cfg.fill(&mut self.k, "k")?;
        // A flag for either form of the signal strength shadows both config keys.
        if self.beta_min.is_none() && self.beta_min_sq.is_none() {
            cfg.fill(&mut self.beta_min, "beta-min")?;
            cfg.fill(&mut self.beta_min_sq, "beta-min-sq")?;
        }
        cfg.fill(&mut self.gamma, "gamma")?;
        cfg.fill(&mut self.n, "n")
    }

    fn beta_min(&self) -> Result<Option<f64>> {
        match (self.beta_min, self.beta_min_sq) {
            (Some(_), Some(_)) => Err(Error::usage("give only one of --beta-min and --beta-min-sq")),
            (Some(b), None) => Ok(Some(b)),
            (None, Some(b2)) if b2 >= 0.0 => Ok(Some(b2.sqrt())),
            (None, Some(b2)) => Err(Error::usage(format!("--beta-min-sq must be nonnegative, got {b2}"))),
            (None, None) => Ok(None),
        }
    }
}

fn required<T>(v: Option<T>, flag: &str) -> Result<T> {
    v.ok_or_else(|| Error::usage(format!("missing required --{flag}")))
}

fn parse_list<T: std::str::FromStr>(s: &str, flag: &str) -> Result<Vec<T>> {
    s.split(',')
        .map(str::trim)
        .filter(|v| !v.is_empty())
        .map(|v| v.parse::<T>().map_err(|_| Error::usage(format!("--{flag}: cannot parse '{v}'"))))
        .collect()
}

/// A rendered table plus the process status it implies.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub table: Table,
    pub status: i32,
    pub format: Format,
    pub out: Option<PathBuf>,
    /// Replaces the table rendering when JSON is requested.
    pub json: Option<serde_json::Value>,
}

impl Outcome {
    pub fn rendered(&self) -> String {
        match self.format {
            Format::Csv => self.table.to_csv(),
            Format::Json => match &self.json {
                Some(v) => serde_json::to_string_pretty(v).expect("json serialisation") + "\n",
                None => self.table.to_json(),
            },
        }
    }
}

fn resolve_io(io: &mut IoArgs, cfg: &Config) -> Result<Format> {
    cfg.fill(&mut io.format, "format")?;
    cfg.fill(&mut io.out, "out")?;
    io.format.as_deref().map_or(Ok(Format::Csv), str::parse)
}

/// Resolves arguments and runs one subcommand.
pub fn execute(command: Command) -> Result<Outcome> {
    match command {
        Command::Bounds { mut params, mut io } => {
            let cfg = load_config(&io)?;
            params.fill(&cfg)?;
            let format = resolve_io(&mut io, &cfg)?;
            let input = BoundsInput {
                p: required(params.p, "p")?,
                k: required(params.k, "k")?,
                beta_min: required(params.beta_min()?, "beta-min")?,
                gamma: params.gamma.unwrap_or(1.0),
                n: params.n,
            };
            Ok(Outcome { table: cmd_bounds(&input)?, status: 0, format, out: io.out, json: None })
        }
        Command::Sweep { mut params, mut sweep, mut io } => {
            let cfg = load_config(&io)?;
            params.fill(&cfg)?;
            let format = resolve_io(&mut io, &cfg)?;
            cfg.fill(&mut sweep.variable, "variable")?;
            cfg.fill(&mut sweep.values, "values")?;
            cfg.fill(&mut sweep.start, "start")?;
            cfg.fill(&mut sweep.stop, "stop")?;
            cfg.fill(&mut sweep.count, "count")?;
            cfg.fill(&mut sweep.spacing, "spacing")?;
            let variable: SweepVariable = required(sweep.variable.as_deref(), "variable")?.parse()?;
            let values = match (&sweep.values, sweep.start) {
                (Some(_), Some(_)) => return Err(Error::usage("give either --values or --start/--stop/--count")),
                (Some(list), None) => parse_list::<f64>(list, "values")?,
                (None, Some(start)) => {
                    let spacing = sweep.spacing.as_deref().map_or(Ok(Spacing::Linear), str::parse)?;
                    spaced_values(start, required(sweep.stop, "stop")?, required(sweep.count, "count")?, spacing)?
                }
                (None, None) => return Err(Error::usage("sweep needs --values or --start/--stop/--count")),
            };
            let mut defaulted = Vec::new();
            let mut pick = |v: Option<f64>, default: f64, name: &'static str, swept: bool| {
                v.unwrap_or_else(|| {
                    if !swept {
                        defaulted.push(name);
                    }
                    default
                })
            };
            let p = pick(params.p.map(|p| p as f64), SWEEP_DEFAULT_P as f64, "p", variable == SweepVariable::P);
            let k = pick(params.k.map(|k| k as f64), SWEEP_DEFAULT_K as f64, "k", false);
            let beta_min =
                pick(params.beta_min()?, SWEEP_DEFAULT_BETA_MIN, "beta_min", variable == SweepVariable::BetaMin);
            let spec = SweepSpec {
                variable,
                values,
                fixed: BoundsInput { p: p as usize, k: k as usize, beta_min, gamma: params.gamma.unwrap_or(1.0), n: params.n },
                defaulted,
            };
            Ok(Outcome { table: cmd_sweep(&spec)?, status: 0, format, out: io.out, json: None })
        }
        Command::Simulate { mut params, mut sim, mut io } => {
            let cfg = load_config(&io)?;
            params.fill(&cfg)?;
            let format = resolve_io(&mut io, &cfg)?;
            cfg.fill(&mut sim.trials, "trials")?;
            cfg.fill(&mut sim.seed, "seed")?;
            cfg.fill(&mut sim.ensemble, "ensemble")?;
            cfg.fill(&mut sim.restricted, "restricted")?;
            let seed = required(sim.seed, "seed")?;
            let (n, p, k) = (required(params.n, "n")?, required(params.p, "p")?, required(params.k, "k")?);
            let beta_min = required(params.beta_min()?, "beta-min")?;
            let gamma = params.gamma.unwrap_or(1.0);
            let pm = if beta_min == 0.0 {
                ProblemParams::null_signal(n, p, k, gamma)?
            } else {
                ProblemParams::new(n, p, k, beta_min, gamma)?
            };
            let ensemble = match &sim.ensemble {
                Some(name) => Ensemble::parse_with_gamma(name, Some(gamma))?,
                None => Ensemble::for_params(&pm),
            };
            let which: Restricted = sim.restricted.as_deref().map_or(Ok(Restricted::A), str::parse)?;
            let spec = SimulateSpec { params: pm, ensemble, which, trials: sim.trials.unwrap_or(DEFAULT_TRIALS), seed };
            Ok(Outcome { table: cmd_simulate(&spec)?, status: 0, format, out: io.out, json: None })
        }
        Command::VerifyLemmas { mut scope, mut seed, mut io } => {
            let cfg = load_config(&io)?;
            let format = resolve_io(&mut io, &cfg)?;
            cfg.fill(&mut scope, "scope")?;
            cfg.fill(&mut seed, "seed")?;
            let seed = required(seed, "seed")?;
            let scopes = match scope {
                Some(list) => parse_scope(&list)?,
                None => Scope::ALL.to_vec(),
            };
            let report = cmd_verify_lemmas(&scopes, seed)?;
            let status = if report.all_pass() { 0 } else { 1 };
            Ok(Outcome { table: report.table, status, format, out: io.out, json: None })
        }
        Command::Slopefit { mut family, mut p_values, mut io } => {
            let cfg = load_config(&io)?;
            let format = resolve_io(&mut io, &cfg)?;
            cfg.fill(&mut family, "family")?;
            cfg.fill(&mut p_values, "p-values")?;
            let family: SlopeFamily = required(family.as_deref(), "family")?.parse()?;
            let ps = match p_values {
                Some(list) => parse_list::<usize>(&list, "p-values")?,
                None => default_slope_p_values(),
            };
            let report = cmd_slopefit(family, &ps)?;
            let json = serde_json::to_value(&report).expect("report serialises");
            Ok(Outcome { table: slopefit_table(&report), status: 0, format, out: io.out, json: Some(json) })
        }
    }
}

/// Runs a command and writes its output; returns the process status.
pub fn run(command: Command) -> Result<i32> {
    let outcome = execute(command)?;
    let text = outcome.rendered();
    match &outcome.out {
        Some(path) => std::fs::write(path, text)?,
        None => {
            use std::io::Write;
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            stdout.flush()?;
        }
    }
    Ok(outcome.status)
}
