//! Generalized dynamic-network codes (GDNC) for cooperative multi-user uplinks.
//!
//! The crate covers finite-field block codes and their distance
//! certification, a Rayleigh block-fading outage model, round-level protocol
//! simulation for decode-and-forward, binary network coding, DNC and GDNC,
//! exact outage enumeration, and a reproducible Monte Carlo runner.

pub mod analysis;
pub mod channel;
pub mod code;
pub mod decoder;
pub mod error;
pub mod experiment;
pub mod field;
pub mod matrix;
pub mod montecarlo;
pub mod protocol;
pub mod report;

pub use error::{Error, Result};
