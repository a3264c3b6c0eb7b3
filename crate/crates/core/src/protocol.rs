//! One round of a cooperative scheme: broadcast phase, inter-user decoding,
//! cooperative phase and base-station erasure decoding.
//!
//! Column convention for the generator and for every per-column vector:
//! the first `k1 * M` columns are the broadcast packets ordered user-major
//! then slot (`user * k1 + slot`), followed by the `k2 * M` parity packets,
//! again user-major then slot. Information packet `user * k1 + slot` is row
//! `user * k1 + slot` of the generator.
//!
//! Schemes:
//! - GDNC: every parity is a linear combination of the packets its sender
//!   decoded; undecoded packets enter as zero.
//! - DNC: GDNC with `k1 = 1`, `k2 = M - 1`. For `M = 2`, a user that failed
//!   to decode its partner retransmits its own packet instead, and the base
//!   station maximum-ratio combines it with the direct copy.
//! - BNC: two users, both send the binary sum of the packets they hold.
//! - DF: two users, each repeats its partner's packet if decoded and its own
//!   otherwise; repeated copies are maximum-ratio combined at the base station.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::channel::{draw_fade, FadeDraw};
use crate::code::{golden_bnc, golden_df, CodeSpec, DEFAULT_BUDGET};
use crate::decoder::{recoverable_symbols, symbol_recoverable, ErasurePattern};
use crate::error::{Error, Result};
use crate::matrix::Matrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    Df,
    Bnc,
    Dnc,
    Gdnc,
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Scheme::Df => "df",
            Scheme::Bnc => "bnc",
            Scheme::Dnc => "dnc",
            Scheme::Gdnc => "gdnc",
        })
    }
}

impl FromStr for Scheme {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "df" => Ok(Scheme::Df),
            "bnc" => Ok(Scheme::Bnc),
            "dnc" => Ok(Scheme::Dnc),
            "gdnc" => Ok(Scheme::Gdnc),
            _ => Err(Error::Config(format!("unknown scheme `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SchemeConfig {
    pub scheme: Scheme,
    pub users: usize,
    pub k1: usize,
    pub k2: usize,
    /// Inter-user links share one fade in both directions.
    pub reciprocal: bool,
    pub code: CodeSpec,
}

impl SchemeConfig {
    pub fn new(
        scheme: Scheme,
        users: usize,
        k1: usize,
        k2: usize,
        reciprocal: bool,
        code: CodeSpec,
    ) -> Result<Self> {
        let cfg = |m: String| Err(Error::Config(m));
        if users < 2 {
            return cfg(format!("need at least 2 users, got {users}"));
        }
        if k1 == 0 || k2 == 0 {
            return cfg("k1 and k2 must be at least 1".into());
        }
        match scheme {
            Scheme::Df | Scheme::Bnc if (users, k1, k2) != (2, 1, 1) => {
                return cfg(format!("{scheme} is defined for M = 2, k1 = k2 = 1"));
            }
            Scheme::Dnc if k1 != 1 || k2 != users - 1 => {
                return cfg(format!("dnc requires k1 = 1 and k2 = M - 1 = {}", users - 1));
            }
            _ => {}
        }
        if code.k() != k1 * users || code.n() != (k1 + k2) * users {
            return cfg(format!(
                "code is {}/{} but M = {users}, k1 = {k1}, k2 = {k2} needs {}/{}",
                code.k(),
                code.n(),
                k1 * users,
                (k1 + k2) * users
            ));
        }
        if !code.is_systematic() {
            return Err(Error::InvalidCode("generator must be systematic".into()));
        }
        Ok(SchemeConfig {
            scheme,
            users,
            k1,
            k2,
            reciprocal,
            code,
        })
    }

    pub fn df(reciprocal: bool) -> Self {
        let code = golden_df().certify(DEFAULT_BUDGET).expect("tiny code");
        SchemeConfig::new(Scheme::Df, 2, 1, 1, reciprocal, code).unwrap()
    }

    pub fn bnc(reciprocal: bool) -> Self {
        let code = golden_bnc().certify(DEFAULT_BUDGET).expect("tiny code");
        SchemeConfig::new(Scheme::Bnc, 2, 1, 1, reciprocal, code).unwrap()
    }

    pub fn info_packets(&self) -> usize {
        self.k1 * self.users
    }

    pub fn columns(&self) -> usize {
        (self.k1 + self.k2) * self.users
    }

    /// k1 / (k1 + k2).
    pub fn overall_rate(&self) -> f64 {
        self.k1 as f64 / (self.k1 + self.k2) as f64
    }

    pub fn packet(&self, user: usize, slot: usize) -> usize {
        user * self.k1 + slot
    }

    pub fn packet_owner(&self, packet: usize) -> usize {
        packet / self.k1
    }

    pub fn packet_slot(&self, packet: usize) -> usize {
        packet % self.k1
    }

    /// Sender of a column.
    pub fn column_owner(&self, col: usize) -> usize {
        let k = self.info_packets();
        if col < k {
            col / self.k1
        } else {
            (col - k) / self.k2
        }
    }

    /// Number of independent inter-user fades per round.
    pub fn inter_user_links(&self) -> usize {
        let directed = self.k1 * self.users * (self.users - 1);
        if self.reciprocal {
            directed / 2
        } else {
            directed
        }
    }

    /// Independent-link index of the broadcast of `packet` towards `receiver`.
    pub fn link_index(&self, packet: usize, receiver: usize) -> usize {
        let (m, k1) = (self.users, self.k1);
        let sender = self.packet_owner(packet);
        let slot = self.packet_slot(packet);
        debug_assert_ne!(sender, receiver);
        if self.reciprocal {
            let (a, b) = if sender < receiver { (sender, receiver) } else { (receiver, sender) };
            // pairs a < b enumerated row by row
            let pair = a * (2 * m - a - 1) / 2 + (b - a - 1);
            pair * k1 + slot
        } else {
            let r = if receiver < sender { receiver } else { receiver - 1 };
            (sender * (m - 1) + r) * k1 + slot
        }
    }
}

/// Which users hold each information packet after the broadcast phase.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecodingSets {
    users: usize,
    /// decoded[packet * users + user]
    decoded: Vec<bool>,
}

impl DecodingSets {
    pub fn full(cfg: &SchemeConfig) -> Self {
        DecodingSets {
            users: cfg.users,
            decoded: vec![true; cfg.info_packets() * cfg.users],
        }
    }

    /// Sets implied by per-link outage flags (indexed by [`SchemeConfig::link_index`]).
    pub fn from_link_outages(cfg: &SchemeConfig, outage: &[bool]) -> Self {
        assert_eq!(outage.len(), cfg.inter_user_links());
        let mut d = DecodingSets::full(cfg);
        for p in 0..cfg.info_packets() {
            let owner = cfg.packet_owner(p);
            for u in (0..cfg.users).filter(|&u| u != owner) {
                d.decoded[p * cfg.users + u] = !outage[cfg.link_index(p, u)];
            }
        }
        d
    }

    pub fn contains(&self, packet: usize, user: usize) -> bool {
        self.decoded[packet * self.users + user]
    }

    /// Marks `user` as having decoded (or not) `packet`. The owner always holds its packet.
    pub fn set(&mut self, cfg: &SchemeConfig, packet: usize, user: usize, decoded: bool) {
        if cfg.packet_owner(packet) == user {
            return;
        }
        self.decoded[packet * self.users + user] = decoded;
    }

    /// D_{j,t}.
    pub fn members(&self, packet: usize) -> Vec<usize> {
        (0..self.users).filter(|&u| self.contains(packet, u)).collect()
    }

    /// Complement of D_{j,t}.
    pub fn failed(&self, packet: usize) -> Vec<usize> {
        (0..self.users).filter(|&u| !self.contains(packet, u)).collect()
    }

    /// True if `self` is a superset of `other` packet by packet.
    pub fn contains_all(&self, other: &DecodingSets) -> bool {
        self.decoded.iter().zip(&other.decoded).all(|(&a, &b)| a || !b)
    }
}

/// The designed generator with every parity coefficient of an undecoded
/// packet replaced by zero.
pub fn build_effective_generator(cfg: &SchemeConfig, sets: &DecodingSets) -> Result<Matrix> {
    if !cfg.code.is_systematic() {
        return Err(Error::InvalidCode("generator must be systematic".into()));
    }
    let mut g = cfg.code.generator().clone();
    let k = cfg.info_packets();
    for c in k..cfg.columns() {
        let owner = cfg.column_owner(c);
        for p in 0..k {
            if !sets.contains(p, owner) {
                g[(p, c)] = 0;
            }
        }
    }
    Ok(g)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ColumnRole {
    Systematic,
    /// Network-coded parity, decoded on its own.
    Coded,
    /// Plain copy of an information packet, combined with its direct
    /// transmission by MRC. Its generator column is zero.
    Repeat { packet: usize },
}

/// What the base station faces in one round.
#[derive(Debug, Clone, PartialEq)]
pub struct EffectiveCode {
    pub generator: Matrix,
    pub roles: Vec<ColumnRole>,
}

impl EffectiveCode {
    /// Copies of each information packet (direct transmission included).
    pub fn copies(&self, packet: usize) -> usize {
        1 + self
            .roles
            .iter()
            .filter(|r| matches!(r, ColumnRole::Repeat { packet: p } if *p == packet))
            .count()
    }

    /// Columns whose reception is decided per round, in column order.
    pub fn active_columns(&self) -> Vec<usize> {
        self.roles
            .iter()
            .enumerate()
            .filter(|(_, r)| !matches!(r, ColumnRole::Repeat { .. }))
            .map(|(c, _)| c)
            .collect()
    }
}

/// Applies the scheme's cooperative-phase rule to a set of decoding outcomes.
pub fn effective_code(cfg: &SchemeConfig, sets: &DecodingSets) -> EffectiveCode {
    let k = cfg.info_packets();
    let mut generator = build_effective_generator(cfg, sets).expect("config holds a systematic code");
    let mut roles: Vec<ColumnRole> = (0..cfg.columns())
        .map(|c| if c < k { ColumnRole::Systematic } else { ColumnRole::Coded })
        .collect();

    let repeat = |generator: &mut Matrix, roles: &mut Vec<ColumnRole>, col: usize, packet: usize| {
        roles[col] = ColumnRole::Repeat { packet };
        for r in 0..k {
            generator[(r, col)] = 0;
        }
    };

    match cfg.scheme {
        Scheme::Dnc if cfg.users == 2 => {
            for user in 0..2 {
                let partner = cfg.packet(1 - user, 0);
                if !sets.contains(partner, user) {
                    repeat(&mut generator, &mut roles, k + user, cfg.packet(user, 0));
                }
            }
        }
        Scheme::Df => {
            for user in 0..2 {
                let partner = cfg.packet(1 - user, 0);
                let copy = if sets.contains(partner, user) {
                    partner
                } else {
                    cfg.packet(user, 0)
                };
                repeat(&mut generator, &mut roles, k + user, copy);
            }
        }
        _ => {}
    }
    EffectiveCode { generator, roles }
}

/// Raw fades of one round.
#[derive(Debug, Clone, PartialEq)]
pub struct RoundFades {
    /// One per independent inter-user link.
    pub inter_user: Vec<FadeDraw>,
    /// One per transmitted column, base-station side.
    pub bs: Vec<FadeDraw>,
}

impl RoundFades {
    /// Draw order: inter-user links in link-index order, then BS columns.
    pub fn draw<R: Rng + ?Sized>(cfg: &SchemeConfig, rng: &mut R) -> Self {
        let inter_user = (0..cfg.inter_user_links()).map(|_| draw_fade(rng)).collect();
        let bs = (0..cfg.columns()).map(|_| draw_fade(rng)).collect();
        RoundFades { inter_user, bs }
    }
}

/// BS reception of each column. Repeat columns report false; their energy
/// is folded into the systematic column of the packet they copy.
pub fn bs_reception(eff: &EffectiveCode, bs: &[FadeDraw], g: f64) -> Vec<bool> {
    let mut energy: Vec<f64> = bs.iter().map(|f| f.0).collect();
    for (c, role) in eff.roles.iter().enumerate() {
        if let ColumnRole::Repeat { packet } = *role {
            energy[packet] += bs[c].0;
        }
    }
    eff.roles
        .iter()
        .zip(&energy)
        .map(|(role, &e)| !matches!(role, ColumnRole::Repeat { .. }) && e >= g)
        .collect()
}

/// MRC verdict for a packet that has at least one repeated copy.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MrcEvent {
    pub packet: usize,
    pub copies: usize,
    pub outage: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RoundRealization {
    /// Outage flag per independent inter-user link.
    pub inter_user_outage: Vec<bool>,
    pub decoding_sets: DecodingSets,
    /// Raw per-column BS outage (fade below threshold), before combining.
    pub bs_outage: Vec<bool>,
    pub effective: EffectiveCode,
    /// Columns the decoder may use.
    pub received: Vec<bool>,
    pub mrc_events: Vec<MrcEvent>,
    /// Recovery verdict per information packet.
    pub recovered: Vec<bool>,
}

/// Broadcast phase only: decoding sets and BS outage of the systematic columns.
pub fn run_broadcast_phase<R: Rng + ?Sized>(
    cfg: &SchemeConfig,
    g: f64,
    rng: &mut R,
) -> (DecodingSets, Vec<bool>) {
    let fades = RoundFades::draw(cfg, rng);
    let outage: Vec<bool> = fades.inter_user.iter().map(|f| f.0 < g).collect();
    let sets = DecodingSets::from_link_outages(cfg, &outage);
    let sys = fades.bs[..cfg.info_packets()].iter().map(|f| f.0 < g).collect();
    (sets, sys)
}

/// Full round from given fades.
pub fn realize(cfg: &SchemeConfig, g: f64, fades: &RoundFades) -> RoundRealization {
    let inter_user_outage: Vec<bool> = fades.inter_user.iter().map(|f| f.0 < g).collect();
    let sets = DecodingSets::from_link_outages(cfg, &inter_user_outage);
    realize_with_sets(cfg, g, sets, inter_user_outage, &fades.bs)
}

/// Round outcome for explicit decoding sets and BS fades.
pub fn realize_with_sets(
    cfg: &SchemeConfig,
    g: f64,
    sets: DecodingSets,
    inter_user_outage: Vec<bool>,
    bs: &[FadeDraw],
) -> RoundRealization {
    let eff = effective_code(cfg, &sets);
    let received = bs_reception(&eff, bs, g);
    let mrc_events = (0..cfg.info_packets())
        .filter_map(|p| {
            let copies = eff.copies(p);
            (copies > 1).then(|| MrcEvent {
                packet: p,
                copies,
                outage: !received[p],
            })
        })
        .collect();
    let recovered = recoverable_symbols(
        cfg.code.field(),
        &eff.generator,
        &ErasurePattern::from_mask(&received),
    );
    RoundRealization {
        inter_user_outage,
        decoding_sets: sets,
        bs_outage: bs.iter().map(|f| f.0 < g).collect(),
        effective: eff,
        received,
        mrc_events,
        recovered,
    }
}

pub fn run_round<R: Rng + ?Sized>(cfg: &SchemeConfig, g: f64, rng: &mut R) -> RoundRealization {
    let fades = RoundFades::draw(cfg, rng);
    realize(cfg, g, &fades)
}

/// Lean per-trial evaluation for the Monte Carlo hot loop: returns
/// (target packet lost, any of the target owner's packets lost).
pub fn trial_outcome<R: Rng + ?Sized>(
    cfg: &SchemeConfig,
    g: f64,
    target: usize,
    rng: &mut R,
) -> (bool, bool) {
    let fades = RoundFades::draw(cfg, rng);
    let outage: Vec<bool> = fades.inter_user.iter().map(|f| f.0 < g).collect();
    let sets = DecodingSets::from_link_outages(cfg, &outage);
    let eff = effective_code(cfg, &sets);
    let received = bs_reception(&eff, &fades.bs, g);
    let f = cfg.code.field();
    let target_lost = !symbol_recoverable(f, &eff.generator, &received, target);
    let owner = cfg.packet_owner(target);
    let frame_lost = target_lost
        || (0..cfg.k1)
            .map(|s| cfg.packet(owner, s))
            .filter(|&p| p != target)
            .any(|p| !symbol_recoverable(f, &eff.generator, &received, p));
    (target_lost, frame_lost)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::code::{golden_dnc, golden_gdnc, DEFAULT_BUDGET};
    use crate::channel::FadeDraw;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn gdnc22() -> SchemeConfig {
        SchemeConfig::new(Scheme::Gdnc, 2, 2, 2, false, golden_gdnc()).unwrap()
    }

    fn fades(v: &[f64]) -> Vec<FadeDraw> {
        v.iter().map(|&x| FadeDraw(x)).collect()
    }

    #[test]
    fn config_validation() {
        assert!(SchemeConfig::new(Scheme::Gdnc, 2, 1, 1, false, golden_gdnc()).is_err());
        assert!(SchemeConfig::new(Scheme::Dnc, 2, 2, 2, false, golden_gdnc()).is_err());
        assert!(SchemeConfig::new(Scheme::Gdnc, 1, 1, 1, false, golden_dnc()).is_err());
        let c = gdnc22();
        assert_eq!(c.overall_rate(), 0.5);
        assert_eq!(c.code.n() - c.code.k(), c.k2 * c.users);
        let nonsys = CodeSpec::from_rows(
            golden_dnc().field().clone(),
            &[vec![1, 1, 1, 1], vec![0, 1, 1, 2]],
        )
        .unwrap();
        assert!(SchemeConfig::new(Scheme::Gdnc, 2, 1, 1, false, nonsys).is_err());
    }

    #[test]
    fn link_indices_are_a_bijection() {
        for reciprocal in [false, true] {
            for (m, k1) in [(2, 1), (2, 2), (3, 1), (3, 2), (4, 1)] {
                let k2 = 1;
                let f = golden_gdnc().field().clone();
                let parity = Matrix::zeros(k1 * m, k2 * m);
                let code = CodeSpec::systematic(f, &parity).unwrap();
                let cfg = SchemeConfig::new(Scheme::Gdnc, m, k1, k2, reciprocal, code).unwrap();
                let mut seen = vec![0; cfg.inter_user_links()];
                for p in 0..cfg.info_packets() {
                    for u in (0..m).filter(|&u| u != cfg.packet_owner(p)) {
                        seen[cfg.link_index(p, u)] += 1;
                    }
                }
                let expect = if reciprocal { 2 } else { 1 };
                assert!(seen.iter().all(|&s| s == expect), "m={m} k1={k1} rec={reciprocal}");
            }
        }
    }

    #[test]
    fn perfect_channels() {
        let cfg = gdnc22();
        let f = RoundFades {
            inter_user: fades(&[5.0; 4]),
            bs: fades(&[5.0; 8]),
        };
        let r = realize(&cfg, 0.1, &f);
        assert_eq!(r.decoding_sets, DecodingSets::full(&cfg));
        assert_eq!(&r.effective.generator, cfg.code.generator());
        assert!(r.recovered.iter().all(|&x| x));
        assert!(r.bs_outage.iter().all(|&x| !x));
    }

    #[test]
    fn total_bs_erasure_loses_everything() {
        let cfg = gdnc22();
        let f = RoundFades {
            inter_user: fades(&[5.0; 4]),
            bs: fades(&[0.01; 8]),
        };
        assert!(realize(&cfg, 0.1, &f).recovered.iter().all(|&x| !x));
    }

    #[test]
    fn reciprocal_shared_draw() {
        let cfg = SchemeConfig::new(Scheme::Gdnc, 2, 1, 1, true, golden_dnc()).unwrap();
        assert_eq!(cfg.inter_user_links(), 1);
        let sets = DecodingSets::from_link_outages(&cfg, &[true]);
        assert!(!sets.contains(0, 1));
        assert!(!sets.contains(1, 0));
        assert_eq!(sets.members(0), vec![0]);
        assert_eq!(sets.failed(1), vec![0]);
    }

    #[test]
    fn zeroing_touches_parities_only() {
        let cfg = gdnc22();
        let mut sets = DecodingSets::full(&cfg);
        // user 2 (index 1) decoded nothing from user 1
        sets.set(&cfg, 0, 1, false);
        sets.set(&cfg, 1, 1, false);
        let g = build_effective_generator(&cfg, &sets).unwrap();
        let orig = cfg.code.generator();
        for c in 0..8 {
            for r in 0..4 {
                let expect = if c >= 6 && r < 2 { 0 } else { orig[(r, c)] };
                assert_eq!(g[(r, c)], expect, "r={r} c={c}");
            }
        }
        // owner always stays in its own decoding set
        sets.set(&cfg, 0, 0, false);
        assert!(sets.contains(0, 0));
    }

    #[test]
    fn fig2_scenario_recovers_from_own_parities() {
        let cfg = gdnc22();
        let mut sets = DecodingSets::full(&cfg);
        sets.set(&cfg, 0, 1, false);
        sets.set(&cfg, 1, 1, false);
        // BS loses I1(1) direct and both of user 2's parities
        let bs = fades(&[0.0, 1.0, 1.0, 1.0, 1.0, 1.0, 0.0, 0.0]);
        let r = realize_with_sets(&cfg, 0.1, sets, vec![false; 4], &bs);
        // I1(2), I2(1), I2(2) arrive directly, so I1(1) is the only unknown in
        // user 1's parities; it is recoverable iff one of its coefficients
        // there is nonzero.
        let eff = &r.effective.generator;
        let oracle = eff[(0, 4)] != 0 || eff[(0, 5)] != 0;
        assert_eq!((eff[(0, 4)], eff[(0, 5)]), (3, 7));
        assert_eq!(r.recovered[0], oracle);
        assert!(r.recovered.iter().all(|&x| x));
        // losing user 1's parities as well leaves I1(1) unrecoverable
        let bs = fades(&[0.0, 1.0, 1.0, 1.0, 0.0, 0.0, 1.0, 1.0]);
        let mut sets = DecodingSets::full(&cfg);
        sets.set(&cfg, 0, 1, false);
        sets.set(&cfg, 1, 1, false);
        let r = realize_with_sets(&cfg, 0.1, sets, vec![false; 4], &bs);
        assert!(!r.recovered[0]);
    }

    #[test]
    fn dmin_minus_one_erasures_always_recoverable() {
        let cfg = gdnc22();
        let d = cfg.code.clone().certify(DEFAULT_BUDGET).unwrap().dmin().unwrap();
        let sets = DecodingSets::full(&cfg);
        crate::code::for_each_combination(8, d - 1, |erased| {
            let mut bs = vec![FadeDraw(1.0); 8];
            for &e in erased {
                bs[e] = FadeDraw(0.0);
            }
            let r = realize_with_sets(&cfg, 0.1, sets.clone(), vec![false; 4], &bs);
            assert!(r.recovered.iter().all(|&x| x), "erased {erased:?}");
            true
        });
    }

    #[test]
    fn dnc_fallback_uses_mrc() {
        let cfg = SchemeConfig::new(Scheme::Dnc, 2, 1, 1, true, golden_dnc()).unwrap();
        let sets = DecodingSets::from_link_outages(&cfg, &[true]);
        let eff = effective_code(&cfg, &sets);
        assert_eq!(eff.roles[2], ColumnRole::Repeat { packet: 0 });
        assert_eq!(eff.roles[3], ColumnRole::Repeat { packet: 1 });
        assert_eq!(eff.copies(0), 2);
        // direct 0.06 + retransmission 0.06 >= 0.1
        let bs = fades(&[0.06, 0.0, 0.06, 0.0]);
        let r = realize_with_sets(&cfg, 0.1, sets, vec![true], &bs);
        assert!(r.recovered[0]);
        assert!(!r.recovered[1]);
        assert_eq!(r.mrc_events.len(), 2);
        assert!(!r.mrc_events[0].outage);
        assert!(r.mrc_events[1].outage);
    }

    #[test]
    fn gdnc_k1_k2_one_matches_dnc_with_good_inter_user_links() {
        let dnc = SchemeConfig::new(Scheme::Dnc, 2, 1, 1, false, golden_dnc()).unwrap();
        let gdnc = SchemeConfig::new(Scheme::Gdnc, 2, 1, 1, false, golden_dnc()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..2000 {
            let mut f = RoundFades::draw(&dnc, &mut rng);
            f.inter_user.iter_mut().for_each(|x| x.0 = 10.0);
            let a = realize(&dnc, 0.7, &f);
            let b = realize(&gdnc, 0.7, &f);
            assert_eq!(a.effective, b.effective);
            assert_eq!(a.recovered, b.recovered);
        }
    }

    #[test]
    fn df_relays_partner_or_repeats_own() {
        let cfg = SchemeConfig::df(false);
        let mut sets = DecodingSets::full(&cfg);
        let eff = effective_code(&cfg, &sets);
        assert_eq!(eff.roles[2], ColumnRole::Repeat { packet: 1 });
        assert_eq!(eff.roles[3], ColumnRole::Repeat { packet: 0 });
        sets.set(&cfg, 1, 0, false);
        let eff = effective_code(&cfg, &sets);
        assert_eq!(eff.roles[2], ColumnRole::Repeat { packet: 0 });
        assert_eq!(eff.copies(0), 3);
        assert_eq!(eff.active_columns(), vec![0, 1]);
    }

    #[test]
    fn trial_outcome_agrees_with_full_realization() {
        let cfg = gdnc22();
        for seed in 0..500u64 {
            let mut a = ChaCha8Rng::seed_from_u64(seed);
            let mut b = ChaCha8Rng::seed_from_u64(seed);
            let (lost, frame) = trial_outcome(&cfg, 0.8, 0, &mut a);
            let r = run_round(&cfg, 0.8, &mut b);
            assert_eq!(lost, !r.recovered[0]);
            assert_eq!(frame, !(r.recovered[0] && r.recovered[1]));
        }
    }

    #[test]
    fn broadcast_phase_failure_statistics() {
        // non-reciprocal M = 3: Pr{all M-1 partners fail} = Pe^2
        let f = crate::field::Field::of_order(16).unwrap();
        let code = crate::code::design_systematic_code(
            std::sync::Arc::new(f),
            3,
            9,
            crate::code::DesignStrategy::Cauchy,
            None,
            DEFAULT_BUDGET,
        )
        .unwrap();
        let cfg = SchemeConfig::new(Scheme::Gdnc, 3, 1, 2, false, code).unwrap();
        let g = 0.3;
        let pe = crate::channel::pe(g);
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        let n = 200_000;
        let mut hits = 0;
        for _ in 0..n {
            let (sets, _) = run_broadcast_phase(&cfg, g, &mut rng);
            hits += (sets.failed(0).len() == 2) as u32;
        }
        let p = pe * pe;
        let se = (p * (1.0 - p) / n as f64).sqrt();
        assert!((hits as f64 / n as f64 - p).abs() < 3.0 * se);
    }
}
