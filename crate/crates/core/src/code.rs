//! Systematic linear block codes over GF(q): minimum-distance certification,
//! MDS checks, code design and a plain-text exchange format.
//!
//! The text format is one header line `q k n [modulus]` (modulus coefficients
//! low to high, comma separated; the default modulus if omitted) followed by
//! `k` rows of `n` space-separated element values. Lines starting with `#` and blank lines are ignored.

use std::fmt::Write as _;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{prime_power, Field};
use crate::matrix::Matrix;

/// Default enumeration budget for distance certification.
pub const DEFAULT_BUDGET: u64 = 1 << 24;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DistanceMethod {
    Exhaustive,
    ErasureRank,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DistanceCertificate {
    pub dmin: usize,
    /// Nonzero information vector whose codeword has weight `dmin`.
    pub witness: Vec<u8>,
    pub method: DistanceMethod,
}

/// A k x n generator matrix over a field, optionally carrying a certified
/// minimum distance.
#[derive(Debug, Clone, PartialEq)]
pub struct CodeSpec {
    field: Arc<Field>,
    generator: Matrix,
    certificate: Option<DistanceCertificate>,
}

impl CodeSpec {
    pub fn new(field: Arc<Field>, generator: Matrix) -> Result<Self> {
        let (k, n) = (generator.rows(), generator.cols());
        if k == 0 || k > n {
            return Err(Error::InvalidCode(format!("need 1 <= k <= n, got k={k} n={n}")));
        }
        for r in 0..k {
            if let Some(&v) = generator.row(r).iter().find(|&&v| v as usize >= field.q()) {
                return Err(Error::ElementOutOfRange {
                    value: v as u32,
                    q: field.q(),
                });
            }
        }
        Ok(CodeSpec {
            field,
            generator,
            certificate: None,
        })
    }

    pub fn from_rows(field: Arc<Field>, rows: &[Vec<u8>]) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::InvalidCode("no rows".into()));
        }
        if rows.iter().any(|r| r.len() != rows[0].len()) {
            return Err(Error::InvalidCode("rows differ in length".into()));
        }
        CodeSpec::new(field, Matrix::from_rows(rows))
    }

    /// `[I | parity]`.
    pub fn systematic(field: Arc<Field>, parity: &Matrix) -> Result<Self> {
        let k = parity.rows();
        let n = k + parity.cols();
        let mut g = Matrix::zeros(k, n);
        for r in 0..k {
            g[(r, r)] = 1;
            for c in 0..parity.cols() {
                g[(r, k + c)] = parity[(r, c)];
            }
        }
        CodeSpec::new(field, g)
    }

    pub fn field(&self) -> &Arc<Field> {
        &self.field
    }

    pub fn generator(&self) -> &Matrix {
        &self.generator
    }

    pub fn k(&self) -> usize {
        self.generator.rows()
    }

    pub fn n(&self) -> usize {
        self.generator.cols()
    }

    /// Certified minimum distance, if any.
    pub fn dmin(&self) -> Option<usize> {
        self.certificate.as_ref().map(|c| c.dmin)
    }

    pub fn certificate(&self) -> Option<&DistanceCertificate> {
        self.certificate.as_ref()
    }

    /// First k columns form the identity.
    pub fn is_systematic(&self) -> bool {
        let k = self.k();
        (0..k).all(|r| (0..k).all(|c| self.generator[(r, c)] == u8::from(r == c)))
    }

    pub fn encode(&self, info: &[u8]) -> Vec<u8> {
        self.generator.left_mul(&self.field, info)
    }

    /// Certifies d_min with the cheapest method that fits the budget.
    pub fn certify(self, budget: u64) -> Result<Self> {
        let cert = match self.min_distance_exhaustive(budget) {
            Ok(c) => c,
            Err(e) if e.is_budget() => self.min_distance_erasure(budget)?,
            Err(e) => return Err(e),
        };
        Ok(self.with_certificate(cert))
    }

    fn with_certificate(mut self, cert: DistanceCertificate) -> Self {
        self.certificate = Some(cert);
        self
    }

    /// Exact d_min by enumerating all q^k - 1 nonzero codewords.
    ///
    /// Work is split over the value of the last information symbol and
    /// reduced by `(weight, index)`, so the witness is the lowest-index
    /// minimum-weight vector regardless of thread count.
    pub fn min_distance_exhaustive(&self, budget: u64) -> Result<DistanceCertificate> {
        let f = &*self.field;
        let (k, _n, q) = (self.k(), self.n(), f.q());
        let total = (q as u128).pow(k as u32);
        if total > budget as u128 {
            return Err(Error::Budget {
                what: "exhaustive codeword enumeration".into(),
                needed: total,
                budget: budget as u128,
            });
        }
        // scaled[i][a] = a * row_i
        let scaled: Vec<Vec<Vec<u8>>> = (0..k)
            .map(|i| {
                f.elements()
                    .map(|a| self.generator.row(i).iter().map(|&g| f.mul(a, g)).collect())
                    .collect()
            })
            .collect();
        let inner = q.pow(k as u32 - 1) as u64;

        let best = (0..q)
            .into_par_iter()
            .map(|top| {
                let mut digits = vec![0usize; k];
                digits[k - 1] = top;
                let mut word = scaled[k - 1][top].clone();
                let mut best: Option<(usize, u64)> = None;
                for j in 0..inner {
                    let index = top as u64 * inner + j;
                    if index != 0 {
                        let w = word.iter().filter(|&&x| x != 0).count();
                        if best.map_or(true, |(bw, _)| w < bw) {
                            best = Some((w, index));
                        }
                    }
                    // advance the lower k-1 digits
                    for i in 0..k - 1 {
                        let old = digits[i];
                        let new = (old + 1) % q;
                        digits[i] = new;
                        for (c, (&a, &b)) in
                            word.iter_mut().zip(scaled[i][new].iter().zip(&scaled[i][old]))
                        {
                            *c = f.add(f.sub(*c, b), a);
                        }
                        if new != 0 {
                            break;
                        }
                    }
                }
                best
            })
            .reduce(|| None, |a, b| match (a, b) {
                (Some(x), Some(y)) => Some(x.min(y)),
                (x, None) => x,
                (None, y) => y,
            });

        let (dmin, index) = best.expect("k >= 1 gives at least one nonzero codeword");
        let mut witness = vec![0u8; k];
        let mut rest = index;
        for w in witness.iter_mut() {
            *w = (rest % q as u64) as u8;
            rest /= q as u64;
        }
        Ok(DistanceCertificate {
            dmin,
            witness,
            method: DistanceMethod::Exhaustive,
        })
    }

    /// d_min as the size of the smallest column erasure that drops the rank
    /// of the surviving columns below k.
    pub fn min_distance_erasure(&self, budget: u64) -> Result<DistanceCertificate> {
        let f = &*self.field;
        let (k, n) = (self.k(), self.n());
        let max_e = n - k + 1;
        let needed: u128 = (1..=max_e).map(|e| binomial(n, e)).sum();
        if needed > budget as u128 {
            return Err(Error::Budget {
                what: "erasure-rank subset enumeration".into(),
                needed,
                budget: budget as u128,
            });
        }
        for e in 1..=max_e {
            let mut found = None;
            for_each_combination(n, e, |erased| {
                let kept = complement(n, erased);
                let sub = self.generator.select_columns(&kept);
                if sub.rank(f) < k {
                    found = sub.left_null_vector(f);
                    return false;
                }
                true
            });
            if let Some(witness) = found {
                return Ok(DistanceCertificate {
                    dmin: e,
                    witness,
                    method: DistanceMethod::ErasureRank,
                });
            }
        }
        unreachable!("erasing n-k+1 columns leaves fewer than k columns")
    }

    pub fn is_mds(&self) -> Result<bool> {
        let d = self.dmin().ok_or(Error::Uncertified)?;
        Ok(d == singleton_bound(self.k(), self.n()))
    }

    pub fn to_text(&self) -> String {
        let f = &self.field;
        let modulus: Vec<String> = f.modulus().iter().map(|c| c.to_string()).collect();
        let mut s = format!("{} {} {} {}\n", f.q(), self.k(), self.n(), modulus.join(","));
        for r in 0..self.k() {
            let row: Vec<String> = self.generator.row(r).iter().map(|v| v.to_string()).collect();
            let _ = writeln!(s, "{}", row.join(" "));
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let (hline, header) = lines.next().ok_or(Error::Parse {
            line: 1,
            msg: "missing header".into(),
        })?;
        let perr = |line: usize, msg: String| Error::Parse { line, msg };
        let parts: Vec<&str> = header.split_whitespace().collect();
        if parts.len() != 3 && parts.len() != 4 {
            return Err(perr(hline, "header must be `q k n [modulus]`".into()));
        }
        let num = |s: &str, what: &str| -> Result<usize> {
            s.parse::<usize>()
                .map_err(|_| perr(hline, format!("bad {what} `{s}`")))
        };
        let q = num(parts[0], "q")?;
        let k = num(parts[1], "k")?;
        let n = num(parts[2], "n")?;
        let modulus: Option<Vec<u8>> = parts
            .get(3)
            .map(|m| {
                m.split(',')
                    .map(|c| c.parse::<u8>())
                    .collect::<std::result::Result<_, _>>()
                    .map_err(|_| perr(hline, format!("bad modulus `{m}`")))
            })
            .transpose()?;
        let (p, m) = prime_power(q).ok_or_else(|| perr(hline, format!("{q} is not a prime power")))?;
        let field = Field::new(p, m, modulus.as_deref()).map_err(|e| perr(hline, e.to_string()))?;

        let mut rows = Vec::with_capacity(k);
        for (ln, line) in lines.by_ref() {
            if rows.len() == k {
                return Err(perr(ln, "more rows than k".into()));
            }
            let row: Vec<u8> = line
                .split_whitespace()
                .map(|t| {
                    t.parse::<u8>()
                        .ok()
                        .filter(|&v| (v as usize) < q)
                        .ok_or_else(|| perr(ln, format!("bad element `{t}`")))
                })
                .collect::<Result<_>>()?;
            if row.len() != n {
                return Err(perr(ln, format!("expected {n} entries, got {}", row.len())));
            }
            rows.push(row);
        }
        if rows.len() != k {
            return Err(perr(
                text.lines().count().max(1),
                format!("expected {k} rows, got {}", rows.len()),
            ));
        }
        CodeSpec::from_rows(Arc::new(field), &rows).map_err(|e| perr(hline, e.to_string()))
    }
}

/// n - k + 1.
pub fn singleton_bound(k: usize, n: usize) -> usize {
    assert!(k <= n, "k must not exceed n");
    n - k + 1
}

/// k2 * M + 1: Singleton bound of the GDNC code with M users and k2 parities per user.
pub fn gdnc_diversity_bound(users: usize, k2: usize) -> usize {
    assert!(users >= 2 && k2 >= 1);
    k2 * users + 1
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DesignStrategy {
    Cauchy,
    RandomSearch { seed: u64, max_tries: usize },
}

/// Designs a systematic `[I | P]` code and certifies it.
///
/// `floor` is a minimum acceptable d_min for random search; a best result
/// below it is reported as [`Error::BelowFloor`].
pub fn design_systematic_code(
    field: Arc<Field>,
    k: usize,
    n: usize,
    strategy: DesignStrategy,
    floor: Option<usize>,
    budget: u64,
) -> Result<CodeSpec> {
    if k == 0 || k > n {
        return Err(Error::InvalidCode(format!("need 1 <= k <= n, got k={k} n={n}")));
    }
    let r = n - k;
    if r == 0 {
        return CodeSpec::new(field, Matrix::identity(k))?.certify(budget);
    }
    let q = field.q();
    match strategy {
        DesignStrategy::Cauchy => {
            // Labels x_0..x_{k-1} for rows and y_0.. for parity columns must be
            // distinct. When q = n - 1 the last parity column is the all-ones
            // column (the label at infinity), which keeps every square
            // submatrix nonsingular.
            if q + 1 < n {
                return Err(Error::Infeasible(format!(
                    "Cauchy parity for a {k}/{n} code needs q >= n - 1 = {}, field has q = {q}",
                    n - 1
                )));
            }
            let f = &*field;
            let finite_cols = if q >= n { r } else { r - 1 };
            let mut p = Matrix::zeros(k, r);
            for i in 0..k {
                for j in 0..r {
                    p[(i, j)] = if j < finite_cols {
                        let x = i as u8;
                        let y = (k + j) as u8;
                        f.inv_nonzero(f.sub(x, y))
                    } else {
                        1
                    };
                }
            }
            CodeSpec::systematic(field, &p)?.certify(budget)
        }
        DesignStrategy::RandomSearch { seed, max_tries } => {
            if max_tries == 0 {
                return Err(Error::Config("max_tries must be at least 1".into()));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let bound = singleton_bound(k, n);
            let mut best: Option<CodeSpec> = None;
            for _ in 0..max_tries {
                let mut p = Matrix::zeros(k, r);
                for i in 0..k {
                    for j in 0..r {
                        p[(i, j)] = rng.gen_range(1..q) as u8;
                    }
                }
                let code = CodeSpec::systematic(field.clone(), &p)?.certify(budget)?;
                let d = code.dmin().unwrap();
                if best.as_ref().map_or(true, |b| d > b.dmin().unwrap()) {
                    best = Some(code);
                    if d == bound {
                        break;
                    }
                }
            }
            let best = best.unwrap();
            if let Some(fl) = floor {
                let found = best.dmin().unwrap();
                if found < fl {
                    return Err(Error::BelowFloor { found, floor: fl });
                }
            }
            Ok(best)
        }
    }
}

/// 2/4 DNC generator over GF(4) (modulus x^2 + x + 1).
pub fn golden_dnc() -> CodeSpec {
    let f = Arc::new(Field::new(2, 2, None).unwrap());
    CodeSpec::from_rows(f, &[vec![1, 0, 1, 1], vec![0, 1, 1, 2]]).unwrap()
}

/// 4/8 GDNC generator (M = 2, k1 = k2 = 2) over GF(8), modulus x^3 + x + 1.
pub fn golden_gdnc() -> CodeSpec {
    let f = Arc::new(Field::new(2, 3, None).unwrap());
    CodeSpec::from_rows(
        f,
        &[
            vec![1, 0, 0, 0, 3, 7, 3, 6],
            vec![0, 1, 0, 0, 5, 7, 7, 4],
            vec![0, 0, 1, 0, 2, 4, 6, 1],
            vec![0, 0, 0, 1, 5, 5, 3, 2],
        ],
    )
    .unwrap()
}

/// Binary network code: both users send I1 + I2 in the cooperative phase.
pub fn golden_bnc() -> CodeSpec {
    let f = Arc::new(Field::new(2, 1, None).unwrap());
    CodeSpec::from_rows(f, &[vec![1, 0, 1, 1], vec![0, 1, 1, 1]]).unwrap()
}

/// Decode-and-forward layout: each user relays its partner's packet.
pub fn golden_df() -> CodeSpec {
    let f = Arc::new(Field::new(2, 1, None).unwrap());
    CodeSpec::from_rows(f, &[vec![1, 0, 0, 1], vec![0, 1, 1, 0]]).unwrap()
}

pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

/// Calls `f` on every k-subset of 0..n in lexicographic order until it
/// returns false.
pub fn for_each_combination(n: usize, k: usize, mut f: impl FnMut(&[usize]) -> bool) {
    if k > n {
        return;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        if !f(&idx) {
            return;
        }
        let Some(i) = (0..k).rev().find(|&i| idx[i] != i + n - k) else {
            return;
        };
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

pub(crate) fn complement(n: usize, sorted: &[usize]) -> Vec<usize> {
    let mut out = Vec::with_capacity(n - sorted.len());
    let mut it = sorted.iter().peekable();
    for c in 0..n {
        if it.peek() == Some(&&c) {
            it.next();
        } else {
            out.push(c);
        }
    }
    out
}
