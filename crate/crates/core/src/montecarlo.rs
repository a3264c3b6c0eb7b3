//! Reproducible Monte Carlo FER sweeps.
//!
//! Every trial owns its own random stream: a ChaCha8 key derived from
//! `(seed, snr index)` and the trial index as the stream id. Trials are
//! processed in fixed blocks and only integer counts are reduced, so a curve
//! depends on the seed alone, not on the worker count or scheduling.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analysis::{analytic_outage, diversity_slope, exact_outage, LinkModel};
use crate::channel::ChannelParams;
use crate::error::{Error, Result};
use crate::protocol::{trial_outcome, SchemeConfig};

/// Trials per scheduling block; early stopping is checked between blocks.
pub const BLOCK: u64 = 8192;

/// Refuse sweeps whose worst case exceeds this many column evaluations.
pub const MAX_WORK: u128 = 200_000_000_000;

const Z95: f64 = 1.959_963_984_540_054;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TrialPlan {
    Fixed(u64),
    /// Stop once the 95% Wilson half-width falls below `rel_half_width * fer`.
    Adaptive {
        rel_half_width: f64,
        min_trials: u64,
        max_trials: u64,
    },
}

impl TrialPlan {
    pub fn max_trials(&self) -> u64 {
        match *self {
            TrialPlan::Fixed(n) => n,
            TrialPlan::Adaptive { max_trials, .. } => max_trials,
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub label: String,
    pub scheme: SchemeConfig,
    /// Per-transmission rate used for the outage threshold.
    pub rate: f64,
    pub snr_db: Vec<f64>,
    pub trials: TrialPlan,
    pub seed: u64,
    pub workers: usize,
    /// Information packet whose loss is counted.
    pub target: usize,
    /// Pattern budget for the exact column; `0` disables it.
    pub exact_budget: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FerPoint {
    pub snr_db: f64,
    pub trials: u64,
    pub failures: u64,
    /// Trials where any packet of the target's owner was lost.
    pub frame_failures: u64,
    pub fer: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub analytic: Option<f64>,
    pub exact: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FerCurve {
    pub label: String,
    pub scheme: String,
    pub users: usize,
    pub k1: usize,
    pub k2: usize,
    pub reciprocal: bool,
    pub rate: f64,
    pub seed: u64,
    pub points: Vec<FerPoint>,
    /// Diversity slope over the two highest SNR points.
    pub slope: Option<f64>,
    /// `exact` or `simulated`.
    pub slope_source: Option<String>,
}

impl FerCurve {
    /// Canonical JSON; identical bytes for identical curves.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("curve serializes")
    }
}

/// 95% Wilson score interval.
pub fn wilson_interval(failures: u64, trials: u64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = failures as f64 / n;
    let z2 = Z95 * Z95;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = Z95 / denom * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    let lo = if failures == 0 { 0.0 } else { (center - half).max(0.0) };
    let hi = if failures == trials { 1.0 } else { (center + half).min(1.0) };
    (lo.min(p), hi.max(p))
}

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// ChaCha key for one SNR point.
pub fn point_key(seed: u64, snr_index: usize) -> [u8; 32] {
    let mut state = seed ^ (snr_index as u64).wrapping_mul(0xD1B5_4A32_D192_ED03);
    let mut key = [0u8; 32];
    for chunk in key.chunks_mut(8) {
        chunk.copy_from_slice(&splitmix64(&mut state).to_le_bytes());
    }
    key
}

/// Random stream of one trial.
pub fn trial_rng(key: [u8; 32], trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::from_seed(key);
    rng.set_stream(trial);
    rng
}

fn validate(cfg: &RunConfig) -> Result<()> {
    if cfg.snr_db.is_empty() {
        return Err(Error::Config("snr grid is empty".into()));
    }
    if cfg.snr_db.iter().any(|s| !s.is_finite()) {
        return Err(Error::Config("snr values must be finite".into()));
    }
    if cfg.workers == 0 {
        return Err(Error::Config("workers must be at least 1".into()));
    }
    match cfg.trials {
        TrialPlan::Fixed(0) => return Err(Error::Config("trials must be at least 1".into())),
        TrialPlan::Adaptive {
            rel_half_width,
            min_trials,
            max_trials,
        } => {
            if !(rel_half_width > 0.0) || max_trials == 0 || min_trials > max_trials {
                return Err(Error::Config(
                    "adaptive trials need rel_half_width > 0 and 1 <= min <= max".into(),
                ));
            }
        }
        _ => {}
    }
    ChannelParams::new(1.0, cfg.rate)?;
    if cfg.target >= cfg.scheme.info_packets() {
        return Err(Error::Config(format!("target packet {} out of range", cfg.target)));
    }
    if cfg.scheme.code.dmin().is_none() {
        return Err(Error::Uncertified);
    }
    let work = cfg.trials.max_trials() as u128
        * cfg.snr_db.len() as u128
        * cfg.scheme.columns() as u128
        * cfg.scheme.info_packets() as u128;
    if work > MAX_WORK {
        return Err(Error::Budget {
            what: format!(
                "Monte Carlo sweep ({} points x {} trials)",
                cfg.snr_db.len(),
                cfg.trials.max_trials()
            ),
            needed: work,
            budget: MAX_WORK,
        });
    }
    Ok(())
}

fn simulate_point(cfg: &RunConfig, snr_index: usize, g: f64) -> (u64, u64, u64) {
    let key = point_key(cfg.seed, snr_index);
    let max = cfg.trials.max_trials();
    let (mut done, mut fails, mut frames) = (0u64, 0u64, 0u64);
    while done < max {
        let end = (done + BLOCK).min(max);
        let (f, fr) = (done..end)
            .into_par_iter()
            .map(|t| {
                let mut rng = trial_rng(key, t);
                let (lost, frame) = trial_outcome(&cfg.scheme, g, cfg.target, &mut rng);
                (lost as u64, frame as u64)
            })
            .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1));
        fails += f;
        frames += fr;
        done = end;
        if let TrialPlan::Adaptive {
            rel_half_width,
            min_trials,
            ..
        } = cfg.trials
        {
            if done >= min_trials && fails > 0 {
                let (lo, hi) = wilson_interval(fails, done);
                let fer = fails as f64 / done as f64;
                if (hi - lo) / 2.0 <= rel_half_width * fer {
                    break;
                }
            }
        }
    }
    (done, fails, frames)
}

/// Runs the sweep on a dedicated pool of `cfg.workers` threads.
pub fn run_sweep(cfg: &RunConfig) -> Result<FerCurve> {
    validate(cfg)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers)
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    pool.install(|| sweep(cfg))
}

fn sweep(cfg: &RunConfig) -> Result<FerCurve> {
    let s = &cfg.scheme;
    let mut points = Vec::with_capacity(cfg.snr_db.len());
    for (i, &snr_db) in cfg.snr_db.iter().enumerate() {
        let ch = ChannelParams::from_db(snr_db, cfg.rate)?;
        let g = ch.threshold();
        let (trials, failures, frame_failures) = simulate_point(cfg, i, g);
        let (ci_low, ci_high) = wilson_interval(failures, trials);
        let analytic = analytic_outage(s.scheme, s.users, s.k1, s.k2, s.reciprocal, ch.pe()).ok();
        let exact = if cfg.exact_budget > 0 {
            match exact_outage(s, cfg.target, LinkModel::from_channel(&ch), cfg.exact_budget) {
                Ok(v) => Some(v),
                Err(e) if e.is_budget() => None,
                Err(e) => return Err(e),
            }
        } else {
            None
        };
        points.push(FerPoint {
            snr_db,
            trials,
            failures,
            frame_failures,
            fer: failures as f64 / trials as f64,
            ci_low,
            ci_high,
            analytic,
            exact,
        });
    }
    let (slope, slope_source) = top_slope(&points, cfg.rate);
    Ok(FerCurve {
        label: cfg.label.clone(),
        scheme: s.scheme.to_string(),
        users: s.users,
        k1: s.k1,
        k2: s.k2,
        reciprocal: s.reciprocal,
        rate: cfg.rate,
        seed: cfg.seed,
        points,
        slope,
        slope_source,
    })
}

/// Slope over the two highest-SNR points, preferring exact values.
fn top_slope(points: &[FerPoint], _rate: f64) -> (Option<f64>, Option<String>) {
    let mut sorted: Vec<&FerPoint> = points.iter().collect();
    sorted.sort_by(|a, b| a.snr_db.total_cmp(&b.snr_db));
    sorted.dedup_by(|a, b| a.snr_db == b.snr_db);
    if sorted.len() < 2 {
        return (None, None);
    }
    let top = &sorted[sorted.len() - 2..];
    let lin = |p: &FerPoint| crate::channel::db_to_linear(p.snr_db);
    if let (Some(a), Some(b)) = (top[0].exact, top[1].exact) {
        if let Ok(s) = diversity_slope(&[(lin(top[0]), a), (lin(top[1]), b)]) {
            return (Some(s), Some("exact".into()));
        }
    }
    match diversity_slope(&[(lin(top[0]), top[0].fer), (lin(top[1]), top[1].fer)]) {
        Ok(s) => (Some(s), Some("simulated".into())),
        Err(_) => (None, None),
    }
}

/// Side-by-side FER table for curves sharing one SNR grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub snr_db: Vec<f64>,
    pub labels: Vec<String>,
    /// rows[i][j] = (fer, analytic, exact) of curve j at snr_db[i]
    pub rows: Vec<Vec<(f64, Option<f64>, Option<f64>)>>,
}

pub fn compare_schemes(curves: &[FerCurve]) -> Result<Comparison> {
    let first = curves
        .first()
        .ok_or_else(|| Error::Config("nothing to compare".into()))?;
    let grid: Vec<f64> = first.points.iter().map(|p| p.snr_db).collect();
    for c in curves {
        let g: Vec<f64> = c.points.iter().map(|p| p.snr_db).collect();
        if g != grid {
            return Err(Error::Config(format!(
                "curve `{}` uses a different snr grid than `{}`",
                c.label, first.label
            )));
        }
    }
    let rows = (0..grid.len())
        .map(|i| {
            curves
                .iter()
                .map(|c| {
                    let p = &c.points[i];
                    (p.fer, p.analytic, p.exact)
                })
                .collect()
        })
        .collect();
    Ok(Comparison {
        snr_db: grid,
        labels: curves.iter().map(|c| c.label.clone()).collect(),
        rows,
    })
}
