//! The field `F_q`, `q = p^m`, as polynomials over `F_p` modulo a fixed
//! irreducible polynomial.
//!
//! An element is stored as the integer `c_0 + c_1 p + … + c_{m-1} p^{m-1}`
//! of its coefficient vector (`c_i` is the coefficient of `x^i`), so the
//! field order used throughout is plain integer order.

use serde::Serialize;

use crate::error::{Error, Result};

/// Largest `q` for which tables are built.
pub const MAX_Q: u64 = 1024;

pub type Fq = u32;

#[derive(Clone, Debug, Serialize)]
pub struct FieldSpec {
    pub p: u32,
    pub m: u32,
    pub q: u32,
    /// Monic modulus, lowest coefficient first, length `m + 1`.
    pub modulus: Vec<u32>,
    #[serde(skip)]
    add: Vec<Fq>,
    #[serde(skip)]
    mul: Vec<Fq>,
    #[serde(skip)]
    neg: Vec<Fq>,
    #[serde(skip)]
    inv: Vec<Fq>,
}

pub fn is_prime(n: u64) -> bool {
    n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| n % d != 0)
}

/// `Some((p, m))` when `q = p^m` with `p` prime and `m >= 1`.
pub fn prime_power(q: u64) -> Option<(u32, u32)> {
    if q < 2 {
        return None;
    }
    let p = (2..=q).find(|d| q % d == 0)?;
    let mut r = q;
    let mut m = 0;
    while r % p == 0 {
        r /= p;
        m += 1;
    }
    (r == 1).then_some((p as u32, m))
}

// Polynomials over F_p, lowest coefficient first, no trailing zeros.
fn trim(mut a: Vec<u32>) -> Vec<u32> {
    while a.last() == Some(&0) {
        a.pop();
    }
    a
}

fn poly_rem(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
    let mut r = trim(a.to_vec());
    let b = trim(b.to_vec());
    let lead_inv = pow_mod(*b.last().unwrap(), p - 2, p);
    while r.len() >= b.len() {
        let shift = r.len() - b.len();
        let c = r.last().unwrap() * lead_inv % p;
        for (i, &bi) in b.iter().enumerate() {
            r[shift + i] = (r[shift + i] + p - c * bi % p) % p;
        }
        r = trim(r);
    }
    r
}

fn pow_mod(mut a: u32, mut e: u32, p: u32) -> u32 {
    let mut acc = 1u64;
    let mut base = a as u64 % p as u64;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base % p as u64;
        }
        base = base * base % p as u64;
        e >>= 1;
    }
    a = acc as u32;
    a
}

fn digits(mut n: u64, p: u32, len: usize) -> Vec<u32> {
    (0..len)
        .map(|_| {
            let d = (n % p as u64) as u32;
            n /= p as u64;
            d
        })
        .collect()
}

fn from_digits(d: &[u32], p: u32) -> u32 {
    d.iter().rev().fold(0, |acc, &c| acc * p + c)
}

/// Trial division by every monic polynomial of degree `1..=deg/2`.
pub fn is_irreducible(poly: &[u32], p: u32) -> bool {
    let f = trim(poly.to_vec());
    let deg = match f.len() {
        0 => return false,
        n => n - 1,
    };
    if deg == 0 {
        return false;
    }
    for d in 1..=deg / 2 {
        for low in 0..(p as u64).pow(d as u32) {
            let mut g = digits(low, p, d);
            g.push(1);
            if poly_rem(&f, &g, p).is_empty() {
                return false;
            }
        }
    }
    true
}

/// The monic irreducible of degree `m` whose low coefficients, read as a
/// base-`p` integer, are smallest. Gives `x^2+x+1` for `F_4`, `x^3+x+1`
/// for `F_8`, `x^2+1` for `F_9`.
pub fn default_modulus(p: u32, m: u32) -> Vec<u32> {
    (0..(p as u64).pow(m))
        .map(|low| {
            let mut f = digits(low, p, m as usize);
            f.push(1);
            f
        })
        .find(|f| is_irreducible(f, p))
        .expect("an irreducible polynomial exists in every degree")
}

impl FieldSpec {
    pub fn new(p: u32, m: u32) -> Result<Self> {
        if !is_prime(p as u64) || m == 0 {
            return Err(Error::InvalidField(format!("p = {p} must be prime and m = {m} positive")));
        }
        Self::with_modulus(p, m, default_modulus(p, m))
    }

    pub fn from_order(q: u64) -> Result<Self> {
        let (p, m) = prime_power(q).ok_or_else(|| Error::InvalidField(format!("{q} is not a prime power")))?;
        Self::new(p, m)
    }

    pub fn with_modulus(p: u32, m: u32, modulus: Vec<u32>) -> Result<Self> {
        let q64 = (p as u64).checked_pow(m).unwrap_or(u64::MAX);
        if q64 > MAX_Q {
            return Err(Error::InvalidField(format!("q = {p}^{m} exceeds {MAX_Q}")));
        }
        if modulus.len() != m as usize + 1 || modulus[m as usize] != 1 || modulus.iter().any(|&c| c >= p) {
            return Err(Error::InvalidField("modulus must be monic of degree m over F_p".into()));
        }
        if !is_irreducible(&modulus, p) {
            return Err(Error::InvalidField(format!("modulus {modulus:?} is reducible over F_{p}")));
        }
        let q = q64 as u32;
        let n = q as usize;
        let mut add = vec![0; n * n];
        let mut mul = vec![0; n * n];
        for a in 0..q {
            let da = digits(a as u64, p, m as usize);
            for b in 0..q {
                let db = digits(b as u64, p, m as usize);
                let s: Vec<u32> = da.iter().zip(&db).map(|(x, y)| (x + y) % p).collect();
                add[(a * q + b) as usize] = from_digits(&s, p);
                let mut prod = vec![0u32; 2 * m as usize];
                for (i, &x) in da.iter().enumerate() {
                    for (j, &y) in db.iter().enumerate() {
                        prod[i + j] = (prod[i + j] + x * y) % p;
                    }
                }
                let mut r = poly_rem(&prod, &modulus, p);
                r.resize(m as usize, 0);
                mul[(a * q + b) as usize] = from_digits(&r, p);
            }
        }
        let neg = (0..q).map(|a| (0..q).find(|&b| add[(a * q + b) as usize] == 0).unwrap()).collect();
        let inv = (0..q)
            .map(|a| if a == 0 { 0 } else { (1..q).find(|&b| mul[(a * q + b) as usize] == 1).unwrap() })
            .collect();
        Ok(FieldSpec { p, m, q, modulus, add, mul, neg, inv })
    }

    #[inline]
    pub fn add(&self, a: Fq, b: Fq) -> Fq {
        self.add[(a * self.q + b) as usize]
    }

    #[inline]
    pub fn sub(&self, a: Fq, b: Fq) -> Fq {
        self.add(a, self.neg[b as usize])
    }

    #[inline]
    pub fn neg(&self, a: Fq) -> Fq {
        self.neg[a as usize]
    }

    #[inline]
    pub fn mul(&self, a: Fq, b: Fq) -> Fq {
        self.mul[(a * self.q + b) as usize]
    }

    pub fn inv(&self, a: Fq) -> Result<Fq> {
        if a == 0 {
            Err(Error::ZeroInverse)
        } else {
            Ok(self.inv[a as usize])
        }
    }

    pub fn elements(&self) -> impl Iterator<Item = Fq> {
        0..self.q
    }

    /// The `F_p`-basis `1, x, …, x^{m-1}`.
    pub fn basis(&self) -> Vec<Fq> {
        (0..self.m).map(|i| self.p.pow(i)).collect()
    }

    /// Coordinates over `F_p` in the basis `1, x, …`.
    pub fn coords(&self, a: Fq) -> Vec<u32> {
        digits(a as u64, self.p, self.m as usize)
    }

    pub fn from_coords(&self, c: &[u32]) -> Fq {
        from_digits(c, self.p)
    }

    /// Human-readable modulus, e.g. `x^2+x+1`.
    pub fn modulus_string(&self) -> String {
        let mut terms = Vec::new();
        for (i, &c) in self.modulus.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            let coef = if c == 1 && i > 0 { String::new() } else { c.to_string() };
            terms.push(match i {
                0 => coef,
                1 => format!("{coef}x"),
                _ => format!("{coef}x^{i}"),
            });
        }
        terms.join("+")
    }
}
