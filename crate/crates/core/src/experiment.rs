//! TOML experiment files.
//!
//! ```toml
//! seed = 1
//! trials = 200000                 # or { rel_half_width = 0.1, min = 10000, max = 10000000 }
//! snr = { min_db = 0, max_db = 30, step_db = 2 }   # or { values = [0, 10, 20] }
//!
//! [[scheme]]
//! label = "gdnc"
//! kind = "gdnc"
//! users = 2
//! k1 = 2
//! k2 = 2
//! code = { golden = "gdnc" }      # or { file = "code.txt" } or { design = "cauchy", q = 16 }
//! ```

use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::Deserialize;

use crate::analysis::DEFAULT_PATTERN_BUDGET;
use crate::code::{
    design_systematic_code, golden_bnc, golden_df, golden_dnc, golden_gdnc, CodeSpec,
    DesignStrategy, DEFAULT_BUDGET,
};
use crate::error::{Error, Result};
use crate::field::Field;
use crate::montecarlo::{RunConfig, TrialPlan};
use crate::protocol::{Scheme, SchemeConfig};

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentFile {
    #[serde(default = "default_seed")]
    pub seed: u64,
    pub workers: Option<usize>,
    pub output_dir: Option<PathBuf>,
    pub trials: TrialsEntry,
    #[serde(default)]
    pub snr: SnrGrid,
    #[serde(default = "default_exact_budget")]
    pub exact_budget: u64,
    #[serde(default)]
    pub target: usize,
    #[serde(rename = "scheme")]
    pub schemes: Vec<SchemeEntry>,
}

fn default_seed() -> u64 {
    1
}

fn default_exact_budget() -> u64 {
    DEFAULT_PATTERN_BUDGET
}

fn default_rate() -> f64 {
    0.5
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum TrialsEntry {
    Fixed(u64),
    Adaptive(AdaptiveEntry),
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AdaptiveEntry {
    pub rel_half_width: f64,
    pub min: u64,
    pub max: u64,
}

impl TrialsEntry {
    pub fn plan(&self) -> TrialPlan {
        match *self {
            TrialsEntry::Fixed(n) => TrialPlan::Fixed(n),
            TrialsEntry::Adaptive(AdaptiveEntry {
                rel_half_width,
                min,
                max,
            }) => TrialPlan::Adaptive {
                rel_half_width,
                min_trials: min,
                max_trials: max,
            },
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SnrGrid {
    pub values: Option<Vec<f64>>,
    pub min_db: Option<f64>,
    pub max_db: Option<f64>,
    pub step_db: Option<f64>,
}

impl Default for SnrGrid {
    fn default() -> Self {
        SnrGrid {
            values: None,
            min_db: Some(0.0),
            max_db: Some(40.0),
            step_db: Some(2.0),
        }
    }
}

impl SnrGrid {
    pub fn points(&self) -> Result<Vec<f64>> {
        let range = [self.min_db, self.max_db, self.step_db];
        if let Some(v) = &self.values {
            if range.iter().any(Option::is_some) {
                return Err(Error::Config("snr: give either `values` or a range, not both".into()));
            }
            if v.is_empty() {
                return Err(Error::Config("snr: `values` is empty".into()));
            }
            return Ok(v.clone());
        }
        let min = self.min_db.unwrap_or(0.0);
        let max = self.max_db.unwrap_or(40.0);
        let step = self.step_db.unwrap_or(2.0);
        snr_range(min, max, step)
    }
}

/// `min, min + step, ..., <= max`, rounded to 1e-9 dB so that decimal steps
/// come out as typed.
pub fn snr_range(min: f64, max: f64, step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0) || !(max >= min) || !min.is_finite() || !max.is_finite() {
        return Err(Error::Config(format!(
            "snr range needs step > 0 and max >= min (min={min}, max={max}, step={step})"
        )));
    }
    let count = ((max - min) / step + 1e-9).floor() as usize + 1;
    if count > 10_000 {
        return Err(Error::Config(format!("snr range has {count} points")));
    }
    Ok((0..count)
        .map(|i| ((min + i as f64 * step) * 1e9).round() / 1e9)
        .collect())
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SchemeEntry {
    pub label: Option<String>,
    pub kind: Scheme,
    #[serde(default = "two")]
    pub users: usize,
    #[serde(default = "one")]
    pub k1: usize,
    pub k2: Option<usize>,
    /// Shared fade per inter-user pair; independent directions by default.
    #[serde(default)]
    pub reciprocal: bool,
    #[serde(default = "default_rate")]
    pub rate: f64,
    pub code: Option<CodeEntry>,
}

fn two() -> usize {
    2
}

fn one() -> usize {
    1
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CodeEntry {
    pub golden: Option<String>,
    pub file: Option<PathBuf>,
    pub design: Option<String>,
    pub q: Option<usize>,
    pub seed: Option<u64>,
    pub max_tries: Option<usize>,
    pub floor: Option<usize>,
}

/// A golden generator by name: `df`, `bnc`, `dnc` or `gdnc`.
pub fn golden_code(name: &str) -> Result<CodeSpec> {
    let code = match name {
        "df" => golden_df(),
        "bnc" => golden_bnc(),
        "dnc" => golden_dnc(),
        "gdnc" => golden_gdnc(),
        other => return Err(Error::Config(format!("unknown golden code `{other}`"))),
    };
    code.certify(DEFAULT_BUDGET)
}

/// Smallest GF(2^m) with room for a Cauchy code of length `n`.
pub fn default_design_field(n: usize) -> Result<Field> {
    let m = (1..=8)
        .find(|&m| (1usize << m) + 1 >= n)
        .ok_or_else(|| Error::Infeasible(format!("no field up to GF(256) fits length {n}")))?;
    Field::new(2, m, None)
}

/// Code used when an entry names none: the golden code for the classic
/// configurations, a certified Cauchy code otherwise.
pub fn default_code(scheme: Scheme, users: usize, k1: usize, k2: usize) -> Result<CodeSpec> {
    match (scheme, users, k1, k2) {
        (Scheme::Df, ..) => golden_code("df"),
        (Scheme::Bnc, ..) => golden_code("bnc"),
        (Scheme::Dnc, 2, 1, 1) => golden_code("dnc"),
        (Scheme::Gdnc, 2, 2, 2) => golden_code("gdnc"),
        _ => {
            let (k, n) = (k1 * users, (k1 + k2) * users);
            let f = Arc::new(default_design_field(n)?);
            design_systematic_code(f, k, n, DesignStrategy::Cauchy, None, DEFAULT_BUDGET)
        }
    }
}

impl CodeEntry {
    fn resolve(&self, base: &Path, k: usize, n: usize) -> Result<CodeSpec> {
        let chosen = [self.golden.is_some(), self.file.is_some(), self.design.is_some()];
        if chosen.iter().filter(|&&c| c).count() != 1 {
            return Err(Error::Config(
                "code: give exactly one of `golden`, `file`, `design`".into(),
            ));
        }
        if let Some(name) = &self.golden {
            return golden_code(name);
        }
        if let Some(file) = &self.file {
            let path = base.join(file);
            let text = std::fs::read_to_string(&path)
                .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
            return CodeSpec::from_text(&text)?.certify(DEFAULT_BUDGET);
        }
        let q = self
            .q
            .ok_or_else(|| Error::Config("code: `design` needs `q`".into()))?;
        let field = Arc::new(Field::of_order(q)?);
        let strategy = match self.design.as_deref() {
            Some("cauchy") => DesignStrategy::Cauchy,
            Some("random") => DesignStrategy::RandomSearch {
                seed: self.seed.unwrap_or(1),
                max_tries: self.max_tries.unwrap_or(1000),
            },
            Some(other) => return Err(Error::Config(format!("unknown design `{other}`"))),
            None => unreachable!(),
        };
        design_systematic_code(field, k, n, strategy, self.floor, DEFAULT_BUDGET)
    }
}

/// A validated experiment ready to run.
#[derive(Debug, Clone)]
pub struct Experiment {
    pub runs: Vec<RunConfig>,
    pub output_dir: Option<PathBuf>,
}

pub fn parse_experiment(text: &str, base: &Path) -> Result<Experiment> {
    let file: ExperimentFile =
        toml::from_str(text).map_err(|e| Error::Config(format!("experiment file: {e}")))?;
    file.resolve(base)
}

pub fn load_experiment(path: &Path) -> Result<Experiment> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    parse_experiment(&text, path.parent().unwrap_or(Path::new(".")))
}

impl ExperimentFile {
    pub fn resolve(&self, base: &Path) -> Result<Experiment> {
        if self.schemes.is_empty() {
            return Err(Error::Config("experiment defines no [[scheme]]".into()));
        }
        let snr_db = self.snr.points()?;
        let workers = self.workers.unwrap_or_else(|| {
            std::thread::available_parallelism().map_or(1, |n| n.get())
        });
        let mut runs = Vec::new();
        for (i, s) in self.schemes.iter().enumerate() {
            let k2 = s.k2.unwrap_or(match s.kind {
                Scheme::Dnc => s.users.saturating_sub(1),
                _ => 1,
            });
            let code = match &s.code {
                Some(c) => c.resolve(base, s.k1 * s.users, (s.k1 + k2) * s.users)?,
                None => default_code(s.kind, s.users, s.k1, k2)?,
            };
            let scheme = SchemeConfig::new(s.kind, s.users, s.k1, k2, s.reciprocal, code)?;
            let label = s.label.clone().unwrap_or_else(|| format!("{}-{i}", s.kind));
            if runs.iter().any(|r: &RunConfig| r.label == label) {
                return Err(Error::Config(format!("duplicate scheme label `{label}`")));
            }
            runs.push(RunConfig {
                label,
                scheme,
                rate: s.rate,
                snr_db: snr_db.clone(),
                trials: self.trials.plan(),
                seed: self.seed,
                workers,
                target: self.target,
                exact_budget: self.exact_budget,
            });
        }
        Ok(Experiment {
            runs,
            output_dir: self.output_dir.clone(),
        })
    }
}
