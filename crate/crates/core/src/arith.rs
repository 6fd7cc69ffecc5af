//! Exact scalars and continued fractions.
//!
//! Everything here is exact: rationals are arbitrary-precision fractions in
//! lowest terms, and continued-fraction terms are arbitrary-precision integers.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Exact rational number, always in lowest terms with a positive denominator.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Rational(BigRational);

impl Rational {
    pub fn new(num: impl Into<BigInt>, den: impl Into<BigInt>) -> Rational {
        let den = den.into();
        assert!(!den.is_zero(), "zero denominator");
        Rational(BigRational::new(num.into(), den))
    }

    pub fn from_int(n: impl Into<BigInt>) -> Rational {
        Rational(BigRational::from_integer(n.into()))
    }

    pub fn zero() -> Rational {
        Rational(BigRational::zero())
    }

    pub fn one() -> Rational {
        Rational(BigRational::one())
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_positive()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn abs(&self) -> Rational {
        Rational(self.0.abs())
    }

    pub fn recip(&self) -> Rational {
        Rational(self.0.recip())
    }

    pub fn floor(&self) -> BigInt {
        self.0.floor().to_integer()
    }

    /// Fractional part in `[0, 1)`.
    pub fn fract_pos(&self) -> Rational {
        let f = self.floor();
        self - &Rational::from_int(f)
    }

    /// Integer value, if this rational is an integer.
    pub fn to_integer(&self) -> Option<BigInt> {
        self.is_integer().then(|| self.0.to_integer())
    }

    pub fn to_u64(&self) -> Option<u64> {
        self.to_integer().and_then(|n| n.to_u64())
    }

    pub fn denom_u64(&self) -> Option<u64> {
        self.denom().to_u64()
    }

    pub fn as_big(&self) -> &BigRational {
        &self.0
    }
}

impl From<BigRational> for Rational {
    fn from(r: BigRational) -> Self {
        Rational(r)
    }
}

impl From<i64> for Rational {
    fn from(n: i64) -> Self {
        Rational::from_int(n)
    }
}

impl From<u64> for Rational {
    fn from(n: u64) -> Self {
        Rational::from_int(n)
    }
}

impl From<BigInt> for Rational {
    fn from(n: BigInt) -> Self {
        Rational::from_int(n)
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_integer() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Rational {
    type Err = Error;

    fn from_str(s: &str) -> Result<Rational> {
        let s = s.trim();
        let bad = || Error::Domain(format!("not a rational number: {s:?}"));
        match s.split_once('/') {
            Some((n, d)) => {
                let n: BigInt = n.trim().parse().map_err(|_| bad())?;
                let d: BigInt = d.trim().parse().map_err(|_| bad())?;
                if d.is_zero() {
                    return Err(bad());
                }
                Ok(Rational::new(n, d))
            }
            None => {
                let n: BigInt = s.parse().map_err(|_| bad())?;
                Ok(Rational::from_int(n))
            }
        }
    }
}

macro_rules! binop {
    ($trait:ident, $method:ident) => {
        impl<'a> $trait<&'a Rational> for &'a Rational {
            type Output = Rational;
            fn $method(self, rhs: &'a Rational) -> Rational {
                Rational((&self.0).$method(&rhs.0))
            }
        }
        impl $trait<Rational> for Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                Rational(self.0.$method(rhs.0))
            }
        }
        impl<'a> $trait<&'a Rational> for Rational {
            type Output = Rational;
            fn $method(self, rhs: &'a Rational) -> Rational {
                Rational(self.0.$method(&rhs.0))
            }
        }
        impl<'a> $trait<Rational> for &'a Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                Rational((&self.0).$method(rhs.0))
            }
        }
    };
}

binop!(Add, add);
binop!(Sub, sub);
binop!(Mul, mul);
binop!(Div, div);

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-self.0)
    }
}

impl Neg for &Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-&self.0)
    }
}

impl Serialize for Rational {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Rational {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Rational, D::Error> {
        let v = serde_json::Value::deserialize(d)?;
        match v {
            serde_json::Value::String(s) => s.parse().map_err(serde::de::Error::custom),
            serde_json::Value::Number(n) if n.is_i64() => Ok(Rational::from_int(n.as_i64().unwrap())),
            serde_json::Value::Number(n) if n.is_u64() => Ok(Rational::from_int(n.as_u64().unwrap())),
            other => Err(serde::de::Error::custom(format!("expected rational, got {other}"))),
        }
    }
}

/// A nonnegative rational or infinity. Infinity is the maximum.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ExtRational {
    Finite(Rational),
    Infinity,
}

impl ExtRational {
    pub fn zero() -> ExtRational {
        ExtRational::Finite(Rational::zero())
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, ExtRational::Infinity)
    }

    pub fn finite(&self) -> Option<&Rational> {
        match self {
            ExtRational::Finite(q) => Some(q),
            ExtRational::Infinity => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, ExtRational::Finite(q) if q.is_zero())
    }
}

impl From<Rational> for ExtRational {
    fn from(q: Rational) -> Self {
        ExtRational::Finite(q)
    }
}

impl fmt::Display for ExtRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtRational::Finite(q) => write!(f, "{q}"),
            ExtRational::Infinity => write!(f, "inf"),
        }
    }
}

impl fmt::Debug for ExtRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for ExtRational {
    type Err = Error;

    fn from_str(s: &str) -> Result<ExtRational> {
        let t = s.trim();
        if t == "inf" || t == "∞" {
            return Ok(ExtRational::Infinity);
        }
        let q: Rational = t.parse()?;
        if q.is_negative() {
            return Err(Error::Domain(format!("negative value {q} where a nonnegative one is required")));
        }
        Ok(ExtRational::Finite(q))
    }
}

impl Serialize for ExtRational {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for ExtRational {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<ExtRational, D::Error> {
        let v = serde_json::Value::deserialize(d)?;
        match v {
            serde_json::Value::String(s) => s.parse().map_err(serde::de::Error::custom),
            serde_json::Value::Number(n) if n.is_u64() => {
                Ok(ExtRational::Finite(Rational::from_int(n.as_u64().unwrap())))
            }
            other => Err(serde::de::Error::custom(format!("expected rational or \"inf\", got {other}"))),
        }
    }
}

/// Continued fraction `[a_1, ..., a_k]` with `a_1 >= 0` and later terms `>= 1`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct ContinuedFraction {
    terms: Vec<BigUint>,
}

impl ContinuedFraction {
    /// Validates the term shape; does not require canonical form.
    pub fn new(terms: Vec<BigUint>) -> Result<ContinuedFraction> {
        if terms.is_empty() {
            return Err(Error::Domain("empty continued fraction".into()));
        }
        if terms.iter().skip(1).any(|t| t.is_zero()) {
            return Err(Error::Domain("continued fraction terms after the first must be >= 1".into()));
        }
        Ok(ContinuedFraction { terms })
    }

    pub fn from_u64(terms: &[u64]) -> Result<ContinuedFraction> {
        ContinuedFraction::new(terms.iter().map(|&t| BigUint::from(t)).collect())
    }

    pub fn terms(&self) -> &[BigUint] {
        &self.terms
    }

    /// Terms as machine integers, for callers that enumerate petals.
    pub fn small_terms(&self) -> Result<Vec<usize>> {
        self.terms
            .iter()
            .map(|t| t.to_usize().ok_or_else(|| Error::Domain(format!("continued fraction term {t} too large"))))
            .collect()
    }

    pub fn is_canonical(&self) -> bool {
        let last = self.terms.last().unwrap();
        if self.terms.len() == 1 {
            return true;
        }
        *last > BigUint::one()
    }
}

impl fmt::Display for ContinuedFraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.terms.iter().map(|t| t.to_string()).collect();
        write!(f, "[{}]", parts.join(","))
    }
}

/// Canonical continued-fraction expansion of a positive rational.
pub fn cf_expand(q: &Rational) -> Result<ContinuedFraction> {
    if !q.is_positive() {
        return Err(Error::Domain(format!("continued fraction of nonpositive value {q}")));
    }
    let mut terms = Vec::new();
    let (mut num, mut den) = (q.numer().clone(), q.denom().clone());
    loop {
        let (a, r) = num.div_rem(&den);
        terms.push(a.to_biguint().expect("nonnegative"));
        if r.is_zero() {
            break;
        }
        num = den;
        den = r;
    }
    Ok(ContinuedFraction { terms })
}

/// Exact value of a continued fraction.
pub fn cf_eval(cf: &ContinuedFraction) -> Rational {
    let mut it = cf.terms.iter().rev();
    let mut acc = Rational::from_int(BigInt::from(it.next().unwrap().clone()));
    for t in it {
        acc = Rational::from_int(BigInt::from(t.clone())) + acc.recip();
    }
    acc
}

/// The slope whose Newton lotus is the common part of the Newton lotuses of `g` and `m`.
pub fn wedge(g: &Rational, m: &Rational) -> Result<Rational> {
    let a = cf_expand(g)?;
    let b = cf_expand(m)?;
    let j = a.terms.iter().zip(&b.terms).take_while(|(x, y)| x == y).count();
    // order the pair so that `a` is a prefix of `b` or a_{j+1} < b_{j+1}
    let a = match (a.terms.get(j), b.terms.get(j)) {
        (Some(x), Some(y)) if x > y => b,
        (Some(_), None) => b,
        _ => a,
    };
    let k = a.terms.len();
    let terms = if k == j {
        a.terms[..j].to_vec()
    } else if k == j + 1 {
        a.terms[..=j].to_vec()
    } else {
        let mut t = a.terms[..j].to_vec();
        t.push(&a.terms[j] + BigUint::one());
        t
    };
    Ok(cf_eval(&ContinuedFraction { terms }))
}

fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

fn check_args(n: i64, p: u64) -> Result<()> {
    if n == 0 {
        return Err(Error::Domain("p-adic valuation of 0".into()));
    }
    if !is_prime(p) {
        return Err(Error::Domain(format!("{p} is not prime")));
    }
    Ok(())
}

/// Largest `v` with `p^v | n`.
pub fn p_adic_valuation(n: i64, p: u64) -> Result<u32> {
    check_args(n, p)?;
    let p = p as i128;
    let mut n = n as i128;
    let mut v = 0;
    while n % p == 0 {
        n /= p;
        v += 1;
    }
    Ok(v)
}

/// `n[:p]`, the part of `n` coprime to `p`.
pub fn coprime_part(n: i64, p: u64) -> Result<i64> {
    let v = p_adic_valuation(n, p)?;
    Ok(n / (p as i64).pow(v))
}

/// `n[:p]` with the convention `n[:0] = n`, used to share code between characteristics.
pub fn coprime_part_char(n: u64, char: u64) -> u64 {
    if char == 0 {
        return n;
    }
    let mut n = n;
    while n.is_multiple_of(char) {
        n /= char;
    }
    n
}

/// `p^{ν_p(n)}`, and 1 in characteristic 0.
pub fn wild_part_char(n: u64, char: u64) -> u64 {
    n / coprime_part_char(n, char)
}

pub(crate) fn is_prime_u64(p: u64) -> bool {
    is_prime(p)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    #[test]
    fn display_and_parse() {
        assert_eq!(q(6, 4).to_string(), "3/2");
        assert_eq!(q(4, 2).to_string(), "2");
        assert_eq!("-3/6".parse::<Rational>().unwrap(), q(-1, 2));
        assert_eq!("inf".parse::<ExtRational>().unwrap(), ExtRational::Infinity);
        assert!(ExtRational::Infinity > ExtRational::Finite(q(1000, 1)));
    }

    #[test]
    fn expansions() {
        assert_eq!(cf_expand(&q(4, 3)).unwrap(), ContinuedFraction::from_u64(&[1, 3]).unwrap());
        assert_eq!(cf_expand(&q(5, 3)).unwrap(), ContinuedFraction::from_u64(&[1, 1, 2]).unwrap());
        assert_eq!(cf_expand(&q(1, 1)).unwrap(), ContinuedFraction::from_u64(&[1]).unwrap());
        assert_eq!(cf_expand(&q(7, 2)).unwrap(), ContinuedFraction::from_u64(&[3, 2]).unwrap());
        assert!(cf_expand(&q(0, 1)).is_err());
        assert_eq!(cf_eval(&ContinuedFraction::from_u64(&[0, 2]).unwrap()), q(1, 2));
        assert!(ContinuedFraction::new(vec![]).is_err());
    }

    #[test]
    fn wedge_cases() {
        assert_eq!(wedge(&q(4, 3), &q(5, 3)).unwrap(), q(3, 2));
        assert_eq!(wedge(&q(1, 2), &q(1, 3)).unwrap(), q(1, 2));
        assert_eq!(wedge(&q(7, 5), &q(7, 5)).unwrap(), q(7, 5));
        assert_eq!(wedge(&q(1, 1), &q(3, 2)).unwrap(), q(1, 1));
    }

    #[test]
    fn valuations() {
        assert_eq!(p_adic_valuation(12, 2).unwrap(), 2);
        assert_eq!(coprime_part(12, 2).unwrap(), 3);
        assert_eq!(p_adic_valuation(9, 3).unwrap(), 2);
        assert_eq!(coprime_part(9, 3).unwrap(), 1);
        assert_eq!(coprime_part(29, 3).unwrap(), 29);
        assert!(coprime_part(0, 3).is_err());
        assert!(coprime_part(12, 4).is_err());
        assert_eq!(coprime_part_char(12, 0), 12);
    }
}
