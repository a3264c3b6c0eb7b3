//! Table-driven arithmetic over GF(p^m) for fields of order at most 256.
//!
//! Elements are stored as `u8` using the canonical encoding
//! `value = d_0 + d_1 p + ... + d_{m-1} p^{m-1}`, where `d_i` are the
//! coefficients of the polynomial representative modulo the field modulus.
//! For p = 2 this is the usual bit-packed representation, so addition is XOR.
//!
//! Default moduli (coefficients listed high to low degree):
//!
//! | field   | modulus                  |
//! |---------|--------------------------|
//! | GF(p)   | x                        |
//! | GF(4)   | x^2 + x + 1              |
//! | GF(8)   | x^3 + x + 1              |
//! | GF(16)  | x^4 + x + 1              |
//! | GF(32)  | x^5 + x^2 + 1            |
//! | GF(64)  | x^6 + x + 1              |
//! | GF(128) | x^7 + x + 1              |
//! | GF(256) | x^8 + x^4 + x^3 + x^2 + 1|
//! | GF(9)   | x^2 + 1                  |
//! | GF(27)  | x^3 + 2x + 1             |
//! | GF(25)  | x^2 + 2                  |
//! | GF(49)  | x^2 + 1                  |
//!
//! Any other (p, m) uses the first monic irreducible polynomial of degree m
//! when the lower coefficients are read as a base-p number and counted up
//! from zero.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};

pub const MAX_ORDER: usize = 256;

/// Finite field description together with its full lookup tables.
#[derive(Clone)]
pub struct Field {
    p: u32,
    m: u32,
    q: usize,
    /// Monic modulus, coefficients low to high, length m + 1.
    modulus: Vec<u8>,
    add: Vec<u8>,
    mul: Vec<u8>,
    neg: Vec<u8>,
    inv: Vec<u8>,
    exp: Vec<u8>,
    log: Vec<u8>,
    generator: u8,
}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Field")
            .field("p", &self.p)
            .field("m", &self.m)
            .field("modulus", &self.modulus)
            .finish()
    }
}

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.m == other.m && self.modulus == other.modulus
    }
}

impl Eq for Field {}

pub fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Splits a prime power `q` into `(p, m)`.
pub fn prime_power(q: usize) -> Option<(u32, u32)> {
    if q < 2 {
        return None;
    }
    let q = q as u32;
    let p = (2..=q).find(|d| q % d == 0)?;
    let mut rest = q;
    let mut m = 0;
    while rest % p == 0 {
        rest /= p;
        m += 1;
    }
    (rest == 1).then_some((p, m))
}

fn default_modulus(p: u32, m: u32) -> Option<Vec<u8>> {
    let v: &[u8] = match (p, m) {
        (_, 1) => &[0, 1],
        (2, 2) => &[1, 1, 1],
        (2, 3) => &[1, 1, 0, 1],
        (2, 4) => &[1, 1, 0, 0, 1],
        (2, 5) => &[1, 0, 1, 0, 0, 1],
        (2, 6) => &[1, 1, 0, 0, 0, 0, 1],
        (2, 7) => &[1, 1, 0, 0, 0, 0, 0, 1],
        (2, 8) => &[1, 0, 1, 1, 1, 0, 0, 0, 1],
        (3, 2) => &[1, 0, 1],
        (3, 3) => &[1, 2, 0, 1],
        (5, 2) => &[2, 0, 1],
        (7, 2) => &[1, 0, 1],
        _ => return None,
    };
    Some(v.to_vec())
}

fn search_irreducible(p: u32, m: u32) -> Vec<u8> {
    let count = (p as usize).pow(m);
    for low in 0..count {
        let mut poly = digits(low, p, m as usize);
        poly.push(1);
        if find_factor(&poly, p).is_none() {
            return poly;
        }
    }
    unreachable!("an irreducible polynomial of every degree exists")
}

fn digits(mut v: usize, p: u32, len: usize) -> Vec<u8> {
    let mut out = Vec::with_capacity(len + 1);
    for _ in 0..len {
        out.push((v % p as usize) as u8);
        v /= p as usize;
    }
    out
}

fn pack(d: &[u8], p: u32) -> u8 {
    d.iter()
        .rev()
        .fold(0usize, |acc, &x| acc * p as usize + x as usize) as u8
}

/// Remainder of `a` modulo the monic polynomial `b` over GF(p). Low-to-high coefficients.
fn poly_rem(a: &[u8], b: &[u8], p: u32) -> Vec<u8> {
    let mut r: Vec<u32> = a.iter().map(|&x| x as u32).collect();
    let db = b.len() - 1;
    while r.len() > db {
        let lead = *r.last().unwrap();
        let shift = r.len() - 1 - db;
        if lead != 0 {
            for (i, &c) in b.iter().enumerate() {
                let sub = lead * c as u32 % p;
                r[shift + i] = (r[shift + i] + p - sub) % p;
            }
        }
        r.pop();
    }
    r.into_iter().map(|x| x as u8).collect()
}

/// Trial division by every monic polynomial of degree 1..=deg/2.
fn find_factor(poly: &[u8], p: u32) -> Option<Vec<u8>> {
    let deg = poly.len() - 1;
    for d in 1..=deg / 2 {
        for low in 0..(p as usize).pow(d as u32) {
            let mut cand = digits(low, p, d);
            cand.push(1);
            if poly_rem(poly, &cand, p).iter().all(|&c| c == 0) {
                return Some(cand);
            }
        }
    }
    None
}

impl Field {
    /// Builds GF(p^m). With `modulus = None` the documented default is used.
    pub fn new(p: u32, m: u32, modulus: Option<&[u8]>) -> Result<Field> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if m == 0 {
            return Err(Error::ZeroDegree);
        }
        let q = (p as u64).checked_pow(m).unwrap_or(u64::MAX);
        if q > MAX_ORDER as u64 {
            return Err(Error::FieldTooLarge { p, m });
        }
        let q = q as usize;
        let modulus = match modulus {
            Some(md) => {
                if md.len() != m as usize + 1 {
                    return Err(Error::BadModulus(format!(
                        "expected {} coefficients, got {}",
                        m + 1,
                        md.len()
                    )));
                }
                if md.iter().any(|&c| c as u32 >= p) {
                    return Err(Error::BadModulus(format!("coefficient not below {p}")));
                }
                if md[m as usize] != 1 {
                    return Err(Error::BadModulus("not monic".into()));
                }
                if let Some(factor) = find_factor(md, p) {
                    return Err(Error::ReducibleModulus { factor });
                }
                md.to_vec()
            }
            None => default_modulus(p, m).unwrap_or_else(|| search_irreducible(p, m)),
        };
        Ok(Self::build(p, m, q, modulus))
    }

    /// GF(q) for a prime power q, default modulus.
    pub fn of_order(q: usize) -> Result<Field> {
        let (p, m) = prime_power(q)
            .ok_or_else(|| Error::Config(format!("{q} is not a prime power")))?;
        Field::new(p, m, None)
    }

    fn build(p: u32, m: u32, q: usize, modulus: Vec<u8>) -> Field {
        let mu = m as usize;
        let digs: Vec<Vec<u8>> = (0..q).map(|v| digits(v, p, mu)).collect();

        let mut add = vec![0u8; q * q];
        let mut mul = vec![0u8; q * q];
        let mut prod = vec![0u8; 2 * mu];
        for a in 0..q {
            for b in 0..q {
                let s: Vec<u8> = digs[a]
                    .iter()
                    .zip(&digs[b])
                    .map(|(&x, &y)| ((x as u32 + y as u32) % p) as u8)
                    .collect();
                add[a * q + b] = pack(&s, p);

                prod.iter_mut().for_each(|c| *c = 0);
                for (i, &x) in digs[a].iter().enumerate() {
                    for (j, &y) in digs[b].iter().enumerate() {
                        prod[i + j] = ((prod[i + j] as u32 + x as u32 * y as u32) % p) as u8;
                    }
                }
                let r = poly_rem(&prod[..2 * mu - 1], &modulus, p);
                let mut r = r;
                r.resize(mu, 0);
                mul[a * q + b] = pack(&r, p);
            }
        }

        let mut neg = vec![0u8; q];
        let mut inv = vec![0u8; q];
        for a in 0..q {
            neg[a] = (0..q).find(|&b| add[a * q + b] == 0).unwrap() as u8;
            if a != 0 {
                inv[a] = (1..q).find(|&b| mul[a * q + b] == 1).unwrap() as u8;
            }
        }

        let order = |g: usize| -> usize {
            let mut x = g;
            let mut k = 1;
            while x != 1 {
                x = mul[x * q + g] as usize;
                k += 1;
            }
            k
        };
        let generator = if q == 2 {
            1
        } else {
            (2..q).find(|&g| order(g) == q - 1).unwrap()
        };
        let mut exp = vec![0u8; q - 1];
        let mut log = vec![0u8; q];
        let mut x = 1usize;
        for (i, e) in exp.iter_mut().enumerate() {
            *e = x as u8;
            log[x] = i as u8;
            x = mul[x * q + generator] as usize;
        }

        Field {
            p,
            m,
            q,
            modulus,
            add,
            mul,
            neg,
            inv,
            exp,
            log,
            generator: generator as u8,
        }
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    /// Field order.
    pub fn q(&self) -> usize {
        self.q
    }

    /// Modulus coefficients, low to high.
    pub fn modulus(&self) -> &[u8] {
        &self.modulus
    }

    /// Primitive element used for the exp/log tables.
    pub fn generator(&self) -> u8 {
        self.generator
    }

    #[inline]
    pub fn add(&self, a: u8, b: u8) -> u8 {
        self.add[a as usize * self.q + b as usize]
    }

    #[inline]
    pub fn sub(&self, a: u8, b: u8) -> u8 {
        self.add(a, self.neg[b as usize])
    }

    #[inline]
    pub fn mul(&self, a: u8, b: u8) -> u8 {
        self.mul[a as usize * self.q + b as usize]
    }

    #[inline]
    pub fn neg(&self, a: u8) -> u8 {
        self.neg[a as usize]
    }

    pub fn inv(&self, a: u8) -> Result<u8> {
        if a == 0 {
            return Err(Error::ZeroInverse);
        }
        Ok(self.inv[a as usize])
    }

    /// Inverse without the zero check; callers guarantee `a != 0`.
    #[inline]
    pub(crate) fn inv_nonzero(&self, a: u8) -> u8 {
        debug_assert!(a != 0);
        self.inv[a as usize]
    }

    pub fn div(&self, a: u8, b: u8) -> Result<u8> {
        Ok(self.mul(a, self.inv(b)?))
    }

    pub fn pow(&self, a: u8, e: u64) -> u8 {
        if a == 0 {
            return if e == 0 { 1 } else { 0 };
        }
        let l = self.log[a as usize] as u64 * (e % (self.q as u64 - 1));
        self.exp[(l % (self.q as u64 - 1)) as usize]
    }

    /// Discrete log base [`Field::generator`]; `None` for zero.
    pub fn log(&self, a: u8) -> Option<u8> {
        (a != 0).then(|| self.log[a as usize])
    }

    pub fn exp(&self, i: usize) -> u8 {
        self.exp[i % (self.q - 1)]
    }

    /// Validated element handle.
    pub fn element(&self, value: u32) -> Result<FieldElement<'_>> {
        if value as usize >= self.q {
            return Err(Error::ElementOutOfRange { value, q: self.q });
        }
        Ok(FieldElement {
            field: self,
            value: value as u8,
        })
    }

    pub fn elements(&self) -> impl Iterator<Item = u8> {
        (0..self.q).map(|v| v as u8)
    }
}

/// An element bound to its field. Operators panic on mixed fields; the
/// `checked_*` methods report [`Error::FieldMismatch`] instead.
#[derive(Clone, Copy)]
pub struct FieldElement<'a> {
    field: &'a Field,
    value: u8,
}

impl fmt::Debug for FieldElement<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

impl PartialEq for FieldElement<'_> {
    fn eq(&self, other: &Self) -> bool {
        self.value == other.value && self.same_field(other)
    }
}

impl<'a> FieldElement<'a> {
    pub fn value(self) -> u8 {
        self.value
    }

    pub fn field(self) -> &'a Field {
        self.field
    }

    fn same_field(&self, other: &Self) -> bool {
        std::ptr::eq(self.field, other.field) || self.field == other.field
    }

    fn with(self, value: u8) -> Self {
        FieldElement {
            field: self.field,
            value,
        }
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.same_field(other) {
            Ok(())
        } else {
            Err(Error::FieldMismatch)
        }
    }

    pub fn checked_add(self, other: Self) -> Result<Self> {
        self.check(&other)?;
        Ok(self.with(self.field.add(self.value, other.value)))
    }

    pub fn checked_sub(self, other: Self) -> Result<Self> {
        self.check(&other)?;
        Ok(self.with(self.field.sub(self.value, other.value)))
    }

    pub fn checked_mul(self, other: Self) -> Result<Self> {
        self.check(&other)?;
        Ok(self.with(self.field.mul(self.value, other.value)))
    }

    pub fn inv(self) -> Result<Self> {
        Ok(self.with(self.field.inv(self.value)?))
    }
}

impl<'a> Add for FieldElement<'a> {
    type Output = FieldElement<'a>;
    fn add(self, rhs: Self) -> Self::Output {
        self.checked_add(rhs).expect("field mismatch")
    }
}

impl<'a> Sub for FieldElement<'a> {
    type Output = FieldElement<'a>;
    fn sub(self, rhs: Self) -> Self::Output {
        self.checked_sub(rhs).expect("field mismatch")
    }
}

impl<'a> Mul for FieldElement<'a> {
    type Output = FieldElement<'a>;
    fn mul(self, rhs: Self) -> Self::Output {
        self.checked_mul(rhs).expect("field mismatch")
    }
}

impl<'a> Neg for FieldElement<'a> {
    type Output = FieldElement<'a>;
    fn neg(self) -> Self::Output {
        self.with(self.field.neg(self.value))
    }
}
