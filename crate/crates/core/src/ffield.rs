//! Arithmetic in the finite field `F_{p^m}`, just enough to hold roots of unity.

use crate::arith::is_prime_u64;
use crate::error::{Error, Result};

/// Element of `F_{p^m}`: coefficients `c_0 .. c_{m-1}` of a polynomial in the generator.
pub type FfElem = Vec<u64>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteField {
    p: u64,
    m: usize,
    /// Monic modulus, low degree first, length `m + 1`.
    modulus: Vec<u64>,
}

fn mulmod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn powmod(mut a: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1 % p;
    a %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = mulmod(r, a, p);
        }
        a = mulmod(a, a, p);
        e >>= 1;
    }
    r
}

fn trim(mut v: Vec<u64>) -> Vec<u64> {
    while v.last() == Some(&0) {
        v.pop();
    }
    v
}

/// Remainder of `a` modulo `b` over `F_p`; `b` is nonzero and trimmed.
fn poly_rem(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut r = trim(a.to_vec());
    let db = b.len() - 1;
    let inv_lead = powmod(b[db], p - 2, p);
    while r.len() > db {
        let shift = r.len() - 1 - db;
        let c = mulmod(*r.last().unwrap(), inv_lead, p);
        for (i, &bi) in b.iter().enumerate() {
            let t = mulmod(c, bi, p);
            r[shift + i] = (r[shift + i] + p - t) % p;
        }
        r = trim(r);
    }
    r
}

fn poly_mul(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + mulmod(x, y, p)) % p;
        }
    }
    trim(out)
}

fn poly_gcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let (mut a, mut b) = (trim(a.to_vec()), trim(b.to_vec()));
    while !b.is_empty() {
        let r = poly_rem(&a, &b, p);
        a = b;
        b = r;
    }
    a
}

/// `x^(p^k) mod f`.
fn frobenius_power(f: &[u64], k: usize, p: u64) -> Vec<u64> {
    let mut x = poly_rem(&[0, 1], f, p);
    for _ in 0..k {
        // raise to the p-th power by square and multiply
        let mut base = x.clone();
        let mut acc = vec![1];
        let mut e = p;
        while e > 0 {
            if e & 1 == 1 {
                acc = poly_rem(&poly_mul(&acc, &base, p), f, p);
            }
            base = poly_rem(&poly_mul(&base, &base, p), f, p);
            e >>= 1;
        }
        x = acc;
    }
    x
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut q = 2;
    while q * q <= n {
        if n.is_multiple_of(q) {
            out.push(q);
            while n.is_multiple_of(q) {
                n /= q;
            }
        }
        q += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Rabin's irreducibility test for a monic polynomial of degree `m` over `F_p`.
fn is_irreducible(f: &[u64], p: u64) -> bool {
    let m = f.len() - 1;
    let sub_x = |mut g: Vec<u64>| {
        g.resize(g.len().max(2), 0);
        g[1] = (g[1] + p - 1) % p;
        trim(g)
    };
    if !poly_rem(&sub_x(frobenius_power(f, m, p)), f, p).is_empty() {
        return false;
    }
    prime_factors(m as u64).into_iter().all(|q| {
        let g = sub_x(frobenius_power(f, m / q as usize, p));
        poly_gcd(f, &g, p).len() == 1
    })
}

/// Multiplicative order of `p` modulo `n`.
pub fn multiplicative_order(p: u64, n: u64) -> Result<usize> {
    if n == 0 || num_integer::gcd(p, n) != 1 {
        return Err(Error::Domain(format!("{p} is not invertible modulo {n}")));
    }
    let mut k = 1;
    let mut x = p % n;
    while x != 1 % n {
        x = mulmod(x, p, n);
        k += 1;
    }
    Ok(k)
}

impl FiniteField {
    /// `F_{p^m}` built on the lexicographically smallest monic irreducible of degree `m`,
    /// comparing coefficients from `c_{m-1}` down to `c_0`.
    pub fn new(p: u64, m: usize) -> Result<FiniteField> {
        if !is_prime_u64(p) || p >= 1 << 31 {
            return Err(Error::Domain(format!("characteristic {p} must be a prime below 2^31")));
        }
        if m == 0 {
            return Err(Error::Domain("extension degree must be positive".into()));
        }
        let count = (p as u128).checked_pow(m as u32).ok_or(Error::Overflow("field size"))?;
        for idx in 0..count {
            // idx written in base p, most significant digit = c_{m-1}
            let mut coeffs = vec![0u64; m + 1];
            let mut t = idx;
            for c in coeffs.iter_mut().take(m) {
                *c = (t % p as u128) as u64;
                t /= p as u128;
            }
            coeffs[m] = 1;
            if is_irreducible(&coeffs, p) {
                return Ok(FiniteField { p, m, modulus: coeffs });
            }
        }
        Err(Error::Domain(format!("no irreducible polynomial of degree {m} over F_{p}")))
    }

    /// The smallest field of characteristic `p` containing the `n`-th roots of unity.
    pub fn for_roots_of_unity(p: u64, n: u64) -> Result<FiniteField> {
        FiniteField::new(p, multiplicative_order(p, n)?)
    }

    pub fn characteristic(&self) -> u64 {
        self.p
    }

    pub fn degree(&self) -> usize {
        self.m
    }

    pub fn modulus(&self) -> &[u64] {
        &self.modulus
    }

    pub fn size(&self) -> Result<u64> {
        self.p.checked_pow(self.m as u32).ok_or(Error::Overflow("field size"))
    }

    fn norm(&self, v: Vec<u64>) -> FfElem {
        let mut r = poly_rem(&v, &self.modulus, self.p);
        r.resize(self.m, 0);
        r
    }

    pub fn zero(&self) -> FfElem {
        vec![0; self.m]
    }

    pub fn one(&self) -> FfElem {
        self.from_int(1)
    }

    pub fn from_int(&self, n: i64) -> FfElem {
        let mut v = self.zero();
        v[0] = n.rem_euclid(self.p as i64) as u64;
        v
    }

    /// The element whose coefficient digits spell `idx` in base `p`.
    pub fn from_index(&self, mut idx: u64) -> FfElem {
        let mut v = self.zero();
        for c in v.iter_mut() {
            *c = idx % self.p;
            idx /= self.p;
        }
        v
    }

    pub fn is_zero(&self, a: &FfElem) -> bool {
        a.iter().all(|&c| c == 0)
    }

    pub fn add(&self, a: &FfElem, b: &FfElem) -> FfElem {
        a.iter().zip(b).map(|(x, y)| (x + y) % self.p).collect()
    }

    pub fn sub(&self, a: &FfElem, b: &FfElem) -> FfElem {
        a.iter().zip(b).map(|(x, y)| (x + self.p - y) % self.p).collect()
    }

    pub fn mul(&self, a: &FfElem, b: &FfElem) -> FfElem {
        self.norm(poly_mul(&trim(a.clone()), &trim(b.clone()), self.p))
    }

    pub fn pow(&self, a: &FfElem, mut e: u64) -> FfElem {
        let mut base = a.clone();
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            e >>= 1;
        }
        acc
    }

    pub fn inv(&self, a: &FfElem) -> Result<FfElem> {
        if self.is_zero(a) {
            return Err(Error::Domain("inverse of zero".into()));
        }
        Ok(self.pow(a, self.size()? - 2))
    }

    /// Multiplicative order of a nonzero element.
    pub fn order(&self, a: &FfElem) -> Result<u64> {
        if self.is_zero(a) {
            return Err(Error::Domain("zero has no multiplicative order".into()));
        }
        let mut n = self.size()? - 1;
        for q in prime_factors(n) {
            while n % q == 0 && self.pow(a, n / q) == self.one() {
                n /= q;
            }
        }
        Ok(n)
    }

    /// A primitive `n`-th root of unity: `a^((p^m - 1)/n)` for the first element `a`
    /// (in index order) for which this has order exactly `n`.
    pub fn root_of_unity(&self, n: u64) -> Result<FfElem> {
        let size = self.size()?;
        if n == 0 || (size - 1) % n != 0 {
            return Err(Error::Domain(format!("F_{}^{} has no primitive {n}-th root of unity", self.p, self.m)));
        }
        let e = (size - 1) / n;
        for idx in 1..size {
            let z = self.pow(&self.from_index(idx), e);
            if self.order(&z)? == n {
                return Ok(z);
            }
        }
        Err(Error::Domain(format!("no primitive {n}-th root of unity found")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_fields() {
        let f4 = FiniteField::new(2, 2).unwrap();
        assert_eq!(f4.modulus(), &[1, 1, 1]);
        let f9 = FiniteField::new(3, 2).unwrap();
        assert_eq!(f9.modulus(), &[1, 0, 1]);
        let z = f4.root_of_unity(3).unwrap();
        assert_eq!(f4.order(&z).unwrap(), 3);
        assert_eq!(f4.pow(&z, 3), f4.one());
        let a = f9.from_index(5);
        assert_eq!(f9.mul(&a, &f9.inv(&a).unwrap()), f9.one());
        assert_eq!(multiplicative_order(2, 7).unwrap(), 3);
        assert!(multiplicative_order(3, 6).is_err());
    }

    #[test]
    fn roots_of_unity_in_prime_field() {
        let f = FiniteField::for_roots_of_unity(5, 4).unwrap();
        assert_eq!(f.degree(), 1);
        let z = f.root_of_unity(4).unwrap();
        assert_eq!(z, vec![2]);
    }
}
