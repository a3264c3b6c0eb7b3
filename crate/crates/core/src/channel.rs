//! Rayleigh block-fading outage model.
//!
//! A link with instantaneous gain `|h|^2` (unit-mean exponential) is in
//! outage when `|h|^2 < g`, with `g = (2^R - 1) / snr`. Receivers that
//! maximum-ratio combine `L` copies are in outage when the sum of the `L`
//! gains falls below `g`. Waveform-level noise is never sampled.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelParams {
    /// Linear average SNR.
    pub snr: f64,
    /// Per-transmission rate, bits per channel use.
    pub rate: f64,
}

impl ChannelParams {
    pub fn new(snr: f64, rate: f64) -> Result<Self> {
        if !(snr > 0.0) || !(rate > 0.0) || !snr.is_finite() || !rate.is_finite() {
            return Err(Error::Config(format!(
                "snr and rate must be positive and finite (snr={snr}, rate={rate})"
            )));
        }
        Ok(ChannelParams { snr, rate })
    }

    pub fn from_db(snr_db: f64, rate: f64) -> Result<Self> {
        ChannelParams::new(db_to_linear(snr_db), rate)
    }

    pub fn threshold(&self) -> f64 {
        threshold(self.rate, self.snr)
    }

    pub fn pe(&self) -> f64 {
        pe(self.threshold())
    }
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// g = (2^R - 1) / snr.
pub fn threshold(rate: f64, snr: f64) -> f64 {
    (rate * std::f64::consts::LN_2).exp_m1() / snr
}

/// Single-link outage probability 1 - e^{-g}.
pub fn pe(g: f64) -> f64 {
    if g.is_infinite() {
        return 1.0;
    }
    -(-g).exp_m1()
}

/// Threshold that gives single-link outage probability `pe`.
pub fn threshold_for_pe(pe: f64) -> f64 {
    assert!((0.0..=1.0).contains(&pe), "probability out of range");
    -(-pe).ln_1p()
}

/// Unit-mean exponential draw by inverse CDF.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct FadeDraw(pub f64);

pub fn draw_fade<R: Rng + ?Sized>(rng: &mut R) -> FadeDraw {
    // 1 - U lies in (0, 1], so the log is finite
    let u: f64 = rng.gen();
    FadeDraw(-(1.0 - u).ln())
}

pub fn is_outage(fade: FadeDraw, g: f64) -> bool {
    fade.0 < g
}

/// Combined outage of maximum-ratio combined copies.
pub fn mrc_outage(fades: &[FadeDraw], g: f64) -> bool {
    fades.iter().map(|f| f.0).sum::<f64>() < g
}

/// Erlang-L CDF at g: probability that the sum of L unit-mean exponentials is below g.
pub fn mrc_outage_prob(g: f64, branches: usize) -> f64 {
    assert!(branches >= 1);
    if g <= 0.0 {
        return 0.0;
    }
    if g.is_infinite() {
        return 1.0;
    }
    if branches == 1 {
        return pe(g);
    }
    if g < 0.5 {
        // 1 - e^{-g} sum_{i<L} g^i/i! = e^{-g} sum_{i>=L} g^i/i!
        let mut term = (1..=branches).fold(1.0, |t, i| t * g / i as f64);
        let mut sum = 0.0;
        let mut i = branches;
        while term > sum * 1e-18 {
            sum += term;
            i += 1;
            term *= g / i as f64;
        }
        return (-g).exp() * sum;
    }
    let mut term = 1.0;
    let mut partial = 1.0;
    for i in 1..branches {
        term *= g / i as f64;
        partial += term;
    }
    (1.0 - (-g).exp() * partial).clamp(0.0, 1.0)
}
