//! Outage probability: high-SNR leading terms, exact enumeration over
//! channel-outage patterns, outage-pattern multiplicities and diversity
//! slope estimation.
//!
//! The exact oracle treats every physical link as an independent Bernoulli
//! outage. Inter-user links fail with probability `inter_user_pe`; a coded
//! BS column fails with `1 - e^{-g}`; a systematic column that is combined
//! with `L - 1` repeated copies fails with the Erlang-L CDF at `g`. Repeat
//! columns carry nothing of their own, so they are not enumerated. Only
//! failure probabilities are summed (never `1 - success`), which keeps the
//! deep-tail values accurate.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::{mrc_outage_prob, pe, threshold_for_pe, ChannelParams};
use crate::code::{binomial, for_each_combination};
use crate::decoder::symbol_recoverable;
use crate::error::{Error, Result};
use crate::protocol::{
    build_effective_generator, effective_code, ColumnRole, DecodingSets, Scheme, SchemeConfig,
};

/// Default pattern budget for the exact oracle.
pub const DEFAULT_PATTERN_BUDGET: u64 = 1 << 26;

/// Leading high-SNR term `coefficient * Pe^exponent`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutageFormula {
    pub scheme: Scheme,
    pub coefficient: f64,
    pub exponent: u32,
    pub note: String,
}

impl OutageFormula {
    pub fn eval(&self, pe: f64) -> f64 {
        self.coefficient * pe.powi(self.exponent as i32)
    }
}

/// Closed-form leading term, where one is known.
pub fn analytic_formula(
    scheme: Scheme,
    users: usize,
    k1: usize,
    k2: usize,
    reciprocal: bool,
) -> Result<OutageFormula> {
    let f = |c: f64, d: u32, note: &str| {
        Ok(OutageFormula {
            scheme,
            coefficient: c,
            exponent: d,
            note: note.to_string(),
        })
    };
    let two_user = users == 2 && k1 == 1 && k2 == 1;
    match scheme {
        Scheme::Df if two_user && reciprocal => f(0.5, 2, "DF, reciprocal, MRC at the BS"),
        Scheme::Bnc if two_user => f(1.0, 2, "binary network coding, M = 2"),
        Scheme::Dnc if two_user && reciprocal => f(3.5, 3, "DNC, M = 2, reciprocal"),
        Scheme::Dnc if two_user => f(4.0, 3, "DNC, M = 2, non-reciprocal"),
        Scheme::Dnc if users > 2 && k1 == 1 && k2 == users - 1 => {
            f(1.0, (2 * users - 1) as u32, "DNC as GDNC with k1 = 1, k2 = M - 1")
        }
        Scheme::Gdnc if k2 >= 2 => f(1.0, (users + k2) as u32, "GDNC, k2 >= 2, large field"),
        _ => Err(Error::NoFormula(format!(
            "{scheme} with M = {users}, k1 = {k1}, k2 = {k2}, reciprocal = {reciprocal}"
        ))),
    }
}

pub fn analytic_outage(
    scheme: Scheme,
    users: usize,
    k1: usize,
    k2: usize,
    reciprocal: bool,
    pe: f64,
) -> Result<f64> {
    Ok(analytic_formula(scheme, users, k1, k2, reciprocal)?.eval(pe))
}

/// Link outage probabilities fed to the exact oracle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkModel {
    /// Outage probability of each inter-user link.
    pub inter_user_pe: f64,
    /// BS threshold `g`; BS column probabilities follow from it.
    pub g: f64,
}

impl LinkModel {
    /// Every link with single-link outage probability `pe`.
    pub fn uniform(pe: f64) -> Self {
        LinkModel {
            inter_user_pe: pe,
            g: threshold_for_pe(pe),
        }
    }

    pub fn from_channel(ch: &ChannelParams) -> Self {
        let g = ch.threshold();
        LinkModel {
            inter_user_pe: pe(g),
            g,
        }
    }
}

/// Number of binary patterns the exact oracle visits (upper bound).
pub fn exact_pattern_count(cfg: &SchemeConfig) -> u128 {
    1u128 << (cfg.inter_user_links() + cfg.columns())
}

/// Exact probability that the BS cannot recover information packet `target`.
///
/// Inter-user patterns are summed in index order after being evaluated in
/// parallel, so the result does not depend on the thread count.
pub fn exact_outage(cfg: &SchemeConfig, target: usize, links: LinkModel, budget: u64) -> Result<f64> {
    if target >= cfg.info_packets() {
        return Err(Error::Config(format!("target packet {target} out of range")));
    }
    let needed = exact_pattern_count(cfg);
    if needed > budget as u128 {
        return Err(Error::Budget {
            what: "exact outage enumeration".into(),
            needed,
            budget: budget as u128,
        });
    }
    let e = cfg.inter_user_links();
    let p_inter = links.inter_user_pe;
    let p_col = pe(links.g);
    let field = cfg.code.field();

    let partial: Vec<f64> = (0..1u64 << e)
        .into_par_iter()
        .map(|bits| {
            let outage: Vec<bool> = (0..e).map(|i| bits >> i & 1 == 1).collect();
            let weight = outage.iter().filter(|&&o| o).count() as i32;
            let p_pattern = p_inter.powi(weight) * (1.0 - p_inter).powi(e as i32 - weight);
            if p_pattern == 0.0 {
                return 0.0;
            }
            let sets = DecodingSets::from_link_outages(cfg, &outage);
            let eff = effective_code(cfg, &sets);
            let active = eff.active_columns();
            let erasure_p: Vec<f64> = active
                .iter()
                .map(|&c| match eff.roles[c] {
                    ColumnRole::Systematic => mrc_outage_prob(links.g, eff.copies(c)),
                    _ => p_col,
                })
                .collect();
            let mut received = vec![false; cfg.columns()];
            let mut fail = 0.0;
            for mask in 0u64..1 << active.len() {
                let mut p = p_pattern;
                for (i, &c) in active.iter().enumerate() {
                    let ok = mask >> i & 1 == 1;
                    received[c] = ok;
                    p *= if ok { 1.0 - erasure_p[i] } else { erasure_p[i] };
                }
                if p == 0.0 {
                    continue;
                }
                if !symbol_recoverable(field, &eff.generator, &received, target) {
                    fail += p;
                }
            }
            fail
        })
        .collect();
    Ok(partial.iter().sum())
}

/// [`exact_outage`] with every link at outage probability `pe`.
pub fn exact_outage_at_pe(cfg: &SchemeConfig, target: usize, pe: f64, budget: u64) -> Result<f64> {
    exact_outage(cfg, target, LinkModel::uniform(pe), budget)
}

/// Number of BS erasure patterns of weight `(M - |dbar|) k2 + 1` that leave
/// `target` unrecoverable, when exactly the users in `dbar` failed to decode
/// `target` and every other packet was decoded by everyone. Uses the
/// zero-replacement rule only.
pub fn multiplicity_gamma(
    cfg: &SchemeConfig,
    target: usize,
    dbar: &[usize],
    budget: u64,
) -> Result<u128> {
    let owner = cfg.packet_owner(target);
    if target >= cfg.info_packets() {
        return Err(Error::Config(format!("target packet {target} out of range")));
    }
    if dbar.iter().any(|&u| u == owner || u >= cfg.users) {
        return Err(Error::Config("failure set must hold partners of the owner only".into()));
    }
    let mut sets = DecodingSets::full(cfg);
    for &u in dbar {
        sets.set(cfg, target, u, false);
    }
    let g = build_effective_generator(cfg, &sets)?;
    let n = cfg.columns();
    let w = (cfg.users - sets.failed(target).len()) * cfg.k2 + 1;
    let needed = binomial(n, w);
    if needed > budget as u128 {
        return Err(Error::Budget {
            what: "multiplicity enumeration".into(),
            needed,
            budget: budget as u128,
        });
    }
    let mut count = 0u128;
    let mut received = vec![true; n];
    for_each_combination(n, w, |erased| {
        received.iter_mut().for_each(|r| *r = true);
        for &c in erased {
            received[c] = false;
        }
        if !symbol_recoverable(cfg.code.field(), &g, &received, target) {
            count += 1;
        }
        true
    });
    Ok(count)
}

/// Exponent of the term for `|dbar| = size`: `(M - size) k2 + size + 1`.
pub fn dbar_exponent(users: usize, k2: usize, size: usize) -> usize {
    (users - size) * k2 + size + 1
}

/// Least-squares slope of `-ln p` against `ln snr` (snr linear).
pub fn diversity_slope(points: &[(f64, f64)]) -> Result<f64> {
    if points.len() < 2 {
        return Err(Error::Config("need at least two points".into()));
    }
    if points.windows(2).any(|w| !(w[1].0 > w[0].0)) || points.iter().any(|p| !(p.0 > 0.0)) {
        return Err(Error::Config("snr must be positive and strictly increasing".into()));
    }
    if let Some(p) = points.iter().find(|p| !(p.1 > 0.0)) {
        return Err(Error::Config(format!(
            "probability {} at snr {} is not positive; use the exact oracle or more trials",
            p.1, p.0
        )));
    }
    let xs: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| -p.1.ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    Ok(sxy / sxx)
}

/// Two-point log-log slope of outage against single-link `Pe`.
pub fn pe_slope(pe_a: f64, p_a: f64, pe_b: f64, p_b: f64) -> f64 {
    (p_a / p_b).ln() / (pe_a / pe_b).ln()
}
