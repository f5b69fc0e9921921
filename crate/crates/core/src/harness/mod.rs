//! Monte Carlo experiments: sweep points x realizations x methods, with
//! results streamed to CSV.
//!
//! Every realization seed is `derive_seed(master, realization)`, independent
//! of the sweep point, so all methods at one point see the same channels and
//! neighbouring sweep points reuse the same underlying random numbers.

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;
use std::time::Instant;

use crate::baselines::{exhaustive, split, EXH_MAX_ANTENNAS};
use crate::channel::draw_realization;
use crate::config::SystemConfig;
use crate::error::{Error, Result};
use crate::rng::derive_seed;
use crate::solver::rlx_prox_seeded;

mod config_file;
mod output;

pub use config_file::{load_config_file, ConfigFile};
pub use output::{write_records, RecordWriter, CSV_HEADER};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Experiment {
    Single,
    Cdf,
    SweepSi,
    SweepAntennas,
}

impl Experiment {
    pub fn as_str(self) -> &'static str {
        match self {
            Experiment::Single => "single",
            Experiment::Cdf => "cdf",
            Experiment::SweepSi => "sweep_si",
            Experiment::SweepAntennas => "sweep_antennas",
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    Rlx,
    Exh,
    Split,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Rlx => "rlx",
            Method::Exh => "exh",
            Method::Split => "split",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "rlx" | "rlx-prox" | "rlx_prox" => Ok(Method::Rlx),
            "exh" => Ok(Method::Exh),
            "split" => Ok(Method::Split),
            other => Err(Error::Config(format!("unknown method '{other}'"))),
        }
    }
}

/// Parses a comma separated method list, dropping duplicates.
pub fn parse_methods(s: &str) -> Result<Vec<Method>> {
    let mut out: Vec<Method> = Vec::new();
    for part in s.split(',').filter(|p| !p.trim().is_empty()) {
        let m = part.parse()?;
        if !out.contains(&m) {
            out.push(m);
        }
    }
    if out.is_empty() {
        return Err(Error::Config("empty method list".into()));
    }
    Ok(out)
}

/// Sizing presets for the experiments.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Profile {
    /// Full-scale: 600 realizations, SI -50..-100 dB, M in 8..64.
    Paper,
    /// Reduced: 100 realizations, three SI levels, M in {8, 32, 64}.
    Desk,
}

impl FromStr for Profile {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "paper" => Ok(Profile::Paper),
            "desk" => Ok(Profile::Desk),
            other => Err(Error::Config(format!("unknown profile '{other}'"))),
        }
    }
}

impl Profile {
    pub fn monte_carlo_iters(self) -> usize {
        match self {
            Profile::Paper => 600,
            Profile::Desk => 100,
        }
    }

    pub fn si_levels_db(self) -> Vec<f64> {
        match self {
            Profile::Paper => vec![-50.0, -60.0, -70.0, -80.0, -90.0, -100.0],
            Profile::Desk => vec![-50.0, -75.0, -100.0],
        }
    }

    pub fn antenna_counts(self) -> Vec<usize> {
        match self {
            Profile::Paper => vec![8, 16, 32, 64],
            Profile::Desk => vec![8, 32, 64],
        }
    }
}

/// What to run and where to put it.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub experiment: Experiment,
    pub methods: Vec<Method>,
    pub monte_carlo_iters: usize,
    pub si_levels_db: Vec<f64>,
    pub antenna_counts: Vec<usize>,
    pub output_path: Option<PathBuf>,
    pub seed: u64,
    /// Write measured wall times instead of 0 (makes output non-reproducible).
    pub record_wall_time: bool,
}

impl ExperimentSpec {
    /// Defaults of `experiment` under `profile`; scalar settings come from `cfg`.
    pub fn for_profile(experiment: Experiment, profile: Profile, cfg: &SystemConfig) -> Self {
        let (methods, iters, si, antennas) = match experiment {
            Experiment::Single => (
                vec![Method::Rlx, Method::Exh, Method::Split],
                1,
                vec![cfg.si_cancellation_db],
                vec![cfg.num_antennas],
            ),
            Experiment::Cdf => (
                vec![Method::Rlx, Method::Exh, Method::Split],
                profile.monte_carlo_iters(),
                vec![-100.0],
                vec![8],
            ),
            Experiment::SweepSi => (
                vec![Method::Rlx, Method::Exh, Method::Split],
                profile.monte_carlo_iters(),
                profile.si_levels_db(),
                vec![8],
            ),
            Experiment::SweepAntennas => (
                vec![Method::Rlx, Method::Split],
                profile.monte_carlo_iters(),
                vec![-100.0],
                profile.antenna_counts(),
            ),
        };
        Self {
            experiment,
            methods,
            monte_carlo_iters: iters,
            si_levels_db: si,
            antenna_counts: antennas,
            output_path: None,
            seed: cfg.seed,
            record_wall_time: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.methods.is_empty() {
            return Err(Error::Config("no methods selected".into()));
        }
        if self.si_levels_db.is_empty() || self.antenna_counts.is_empty() {
            return Err(Error::Config("empty sweep".into()));
        }
        if self.si_levels_db.iter().any(|v| !v.is_finite()) {
            return Err(Error::Config("SI levels must be finite".into()));
        }
        if self.methods.contains(&Method::Exh) {
            if let Some(&m) = self.antenna_counts.iter().find(|&&m| m > EXH_MAX_ANTENNAS) {
                return Err(Error::Capacity { requested: m, max: EXH_MAX_ANTENNAS });
            }
        }
        Ok(())
    }

    /// `(M, si_db)` pairs in run order: antenna count outer, SI level inner.
    pub fn sweep_points(&self) -> Vec<(usize, f64)> {
        self.antenna_counts
            .iter()
            .flat_map(|&m| self.si_levels_db.iter().map(move |&s| (m, s)))
            .collect()
    }
}

/// One method on one realization at one sweep point.
#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub experiment: Experiment,
    pub num_antennas: usize,
    pub si_db: f64,
    pub realization_index: usize,
    pub method: Method,
    pub sum_mse: f64,
    pub sum_se: f64,
    pub iterations_used: usize,
    pub converged: bool,
    pub wall_time_ms: f64,
    pub seed_used: u64,
    /// Fingerprint of the channel the method ran on (not written to CSV).
    pub realization_hash: u64,
    /// The method returned an error; `sum_mse`/`sum_se` are NaN.
    pub failed: bool,
}

/// Runs the experiment, handing each record to `sink` as it is produced, and
/// returns all records in output order.
pub fn run_experiment_with<F>(spec: &ExperimentSpec, base: &SystemConfig, mut sink: F) -> Result<Vec<RunRecord>>
where
    F: FnMut(&RunRecord) -> Result<()>,
{
    spec.validate()?;
    base.validate()?;
    let mut records = Vec::new();
    for (m, si_db) in spec.sweep_points() {
        let cfg = SystemConfig { num_antennas: m, si_cancellation_db: si_db, ..base.clone() };
        cfg.validate()?;
        for r in 0..spec.monte_carlo_iters {
            let seed = derive_seed(spec.seed, r as u64);
            let seed = if spec.experiment == Experiment::Single && spec.monte_carlo_iters == 1 { spec.seed } else { seed };
            let ch = draw_realization(&cfg, seed)?;
            let hash = ch.fingerprint();
            for &method in &spec.methods {
                let start = Instant::now();
                let outcome = match method {
                    Method::Rlx => rlx_prox_seeded(&ch, &cfg, seed).map(|s| (s.sum_mse, s.sum_se, s.iterations_used, s.converged)),
                    Method::Exh => exhaustive(&ch, &cfg).map(|b| (b.sum_mse, b.sum_se, 0, true)),
                    Method::Split => split(&ch).map(|b| (b.sum_mse, b.sum_se, 0, true)),
                };
                let elapsed = start.elapsed().as_secs_f64() * 1e3;
                let (sum_mse, sum_se, iterations_used, converged, failed) = match outcome {
                    Ok((e, s, it, c)) => (e, s, it, c, false),
                    Err(err @ (Error::Capacity { .. } | Error::Config(_))) => return Err(err),
                    Err(_) => (f64::NAN, f64::NAN, 0, false, true),
                };
                let rec = RunRecord {
                    experiment: spec.experiment,
                    num_antennas: m,
                    si_db,
                    realization_index: r,
                    method,
                    sum_mse,
                    sum_se,
                    iterations_used,
                    converged,
                    wall_time_ms: if spec.record_wall_time { elapsed } else { 0.0 },
                    seed_used: seed,
                    realization_hash: hash,
                    failed,
                };
                sink(&rec)?;
                records.push(rec);
            }
        }
    }
    Ok(records)
}

/// Runs the experiment and, if `spec.output_path` is set, streams it to CSV.
pub fn run_experiment(spec: &ExperimentSpec, base: &SystemConfig) -> Result<Vec<RunRecord>> {
    match &spec.output_path {
        Some(path) => {
            let mut writer = RecordWriter::create(path)?;
            let records = run_experiment_with(spec, base, |r| writer.write(r))?;
            writer.finish()?;
            Ok(records)
        }
        None => run_experiment_with(spec, base, |_| Ok(())),
    }
}

/// Empirical CDF of the sum SE of `method`: ascending `(value, k / N)` pairs.
pub fn aggregate_cdf(records: &[RunRecord], method: Method) -> Result<Vec<(f64, f64)>> {
    let mut values: Vec<f64> =
        records.iter().filter(|r| r.method == method && !r.failed).map(|r| r.sum_se).collect();
    if values.is_empty() {
        return Err(Error::Empty("no records for method"));
    }
    values.sort_by(f64::total_cmp);
    let n = values.len() as f64;
    Ok(values.into_iter().enumerate().map(|(k, v)| (v, (k + 1) as f64 / n)).collect())
}

/// Grouping key of [`aggregate_mean`]; SI levels are keyed by their bit pattern.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroupKey {
    pub method: Method,
    pub num_antennas: usize,
    si_bits: u64,
}

impl GroupKey {
    pub fn new(method: Method, num_antennas: usize, si_db: f64) -> Self {
        Self { method, num_antennas, si_bits: si_db.to_bits() }
    }

    pub fn si_db(&self) -> f64 {
        f64::from_bits(self.si_bits)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GroupMean {
    pub mean_se: f64,
    pub count: usize,
}

/// Mean sum SE per (method, M, SI level); failed records are skipped.
pub fn aggregate_mean(records: &[RunRecord]) -> BTreeMap<GroupKey, GroupMean> {
    let mut acc: BTreeMap<GroupKey, (f64, usize)> = BTreeMap::new();
    for r in records.iter().filter(|r| !r.failed) {
        let e = acc.entry(GroupKey::new(r.method, r.num_antennas, r.si_db)).or_default();
        e.0 += r.sum_se;
        e.1 += 1;
    }
    acc.into_iter().map(|(k, (s, n))| (k, GroupMean { mean_se: s / n as f64, count: n })).collect()
}

/// Median of a non-empty slice (mean of the two middle values for even length).
pub fn median(values: &[f64]) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::Empty("median of nothing"));
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    Ok(if n % 2 == 1 { v[n / 2] } else { 0.5 * (v[n / 2 - 1] + v[n / 2]) })
}
