//! Base-station erasure decoding by Gaussian elimination.
//!
//! Information symbol `i` is recoverable from the received columns `S` of a
//! k x n generator `G` iff the unit vector `e_i` lies in the column span of
//! `G_S`. After reducing `G_S^T` to reduced row echelon form this is the
//! case iff some row equals `e_i`.

use crate::error::{Error, Result};
use crate::field::Field;
use crate::matrix::Matrix;

/// Sorted, duplicate-free set of received column indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ErasurePattern {
    n: usize,
    received: Vec<usize>,
}

impl ErasurePattern {
    pub fn new(n: usize, mut received: Vec<usize>) -> Result<Self> {
        received.sort_unstable();
        let len = received.len();
        received.dedup();
        if received.len() != len {
            return Err(Error::Config("duplicate column in erasure pattern".into()));
        }
        if let Some(&c) = received.last() {
            if c >= n {
                return Err(Error::Config(format!("column {c} out of range for n = {n}")));
            }
        }
        Ok(ErasurePattern { n, received })
    }

    pub fn from_mask(mask: &[bool]) -> Self {
        ErasurePattern {
            n: mask.len(),
            received: mask
                .iter()
                .enumerate()
                .filter_map(|(i, &r)| r.then_some(i))
                .collect(),
        }
    }

    pub fn all(n: usize) -> Self {
        ErasurePattern {
            n,
            received: (0..n).collect(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn received(&self) -> &[usize] {
        &self.received
    }
}

fn reduced_received(f: &Field, g: &Matrix, received: &[usize]) -> Matrix {
    let mut t = Matrix::zeros(received.len(), g.rows());
    for (r, &c) in received.iter().enumerate() {
        for i in 0..g.rows() {
            t[(r, i)] = g[(i, c)];
        }
    }
    t.rref(f);
    t
}

fn unit_rows(t: &Matrix, k: usize) -> Vec<Option<usize>> {
    let mut out = vec![None; k];
    for r in 0..t.rows() {
        let row = &t.row(r)[..k];
        let mut nz = row.iter().enumerate().filter(|(_, &v)| v != 0);
        if let (Some((i, &1)), None) = (nz.next(), nz.next()) {
            out[i] = Some(r);
        }
    }
    out
}

/// Per-symbol recoverability.
pub fn recoverable_symbols(f: &Field, g: &Matrix, pattern: &ErasurePattern) -> Vec<bool> {
    assert_eq!(pattern.n(), g.cols(), "pattern length does not match the code");
    let t = reduced_received(f, g, pattern.received());
    unit_rows(&t, g.rows()).into_iter().map(|r| r.is_some()).collect()
}

/// Recoverability of the single symbol `target`, given a reception mask.
pub fn symbol_recoverable(f: &Field, g: &Matrix, received: &[bool], target: usize) -> bool {
    debug_assert_eq!(received.len(), g.cols());
    // a received column with support exactly {target} settles it immediately
    let k = g.rows();
    let mut cols = Vec::with_capacity(received.len());
    for (c, &ok) in received.iter().enumerate() {
        if !ok {
            continue;
        }
        let mut support = (0..k).filter(|&i| g[(i, c)] != 0);
        match (support.next(), support.next()) {
            (Some(i), None) if i == target => return true,
            (None, _) => {}
            _ => cols.push(c),
        }
    }
    if !cols.iter().any(|&c| g[(target, c)] != 0) {
        return false;
    }
    let t = reduced_received(f, g, &cols);
    unit_rows(&t, k)[target].is_some()
}

/// Solves for every recoverable information symbol from the received
/// codeword values (`values[j]` belongs to column `pattern.received()[j]`).
pub fn solve(
    f: &Field,
    g: &Matrix,
    pattern: &ErasurePattern,
    values: &[u8],
) -> Result<Vec<Option<u8>>> {
    let k = g.rows();
    let recv = pattern.received();
    assert_eq!(values.len(), recv.len(), "one value per received column");
    let mut aug = Matrix::zeros(recv.len(), k + 1);
    for (r, (&c, &v)) in recv.iter().zip(values).enumerate() {
        for i in 0..k {
            aug[(r, i)] = g[(i, c)];
        }
        aug[(r, k)] = v;
    }
    let pivots = aug.rref_limited(f, k);
    if (pivots.len()..aug.rows()).any(|r| aug[(r, k)] != 0) {
        return Err(Error::Inconsistent);
    }
    Ok(unit_rows(&aug, k)
        .into_iter()
        .map(|r| r.map(|r| aug[(r, k)]))
        .collect())
}
