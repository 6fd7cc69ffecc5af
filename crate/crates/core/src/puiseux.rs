//! Newton-Puiseux series in characteristic 0 and p.
//!
//! Characteristic 0 coefficients are rationals times roots of unity, stored as a positive
//! magnitude and an angle in `[0, 1)`. Characteristic p coefficients start in the prime
//! field and move into `F_{p^m}` under conjugation.

use std::collections::BTreeMap;

use num_integer::Integer;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::arith::{coprime_part_char, is_prime_u64, ExtRational, Rational};
use crate::error::{Error, Result};
use crate::ewtree::{ew_from_profiles, BranchProfile, EwTree};
use crate::ffield::{FfElem, FiniteField};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Coefficient {
    /// `magnitude · exp(2πi · angle)`.
    Polar { magnitude: Rational, angle: Rational },
    /// Element of `F_{p^m}`, low coefficients first; shorter vectors are zero-padded.
    Field(FfElem),
}

impl Coefficient {
    pub fn from_rational(c: &Rational) -> Result<Coefficient> {
        if c.is_zero() {
            return Err(Error::Domain("zero coefficient".into()));
        }
        let angle = if c.is_negative() { Rational::new(1, 2) } else { Rational::zero() };
        Ok(Coefficient::Polar { magnitude: c.abs(), angle })
    }

    fn same(&self, other: &Coefficient) -> bool {
        match (self, other) {
            (Coefficient::Field(a), Coefficient::Field(b)) => {
                let n = a.len().max(b.len());
                (0..n).all(|i| a.get(i).copied().unwrap_or(0) == b.get(i).copied().unwrap_or(0))
            }
            _ => self == other,
        }
    }
}

impl std::fmt::Display for Coefficient {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Coefficient::Polar { magnitude, angle } if angle.is_zero() => write!(f, "{magnitude}"),
            Coefficient::Polar { magnitude, angle } if *angle == Rational::new(1, 2) => write!(f, "-{magnitude}"),
            Coefficient::Polar { magnitude, angle } => write!(f, "{magnitude}*e({angle})"),
            Coefficient::Field(v) if v.iter().skip(1).all(|&c| c == 0) => {
                write!(f, "{}", v.first().copied().unwrap_or(0))
            }
            Coefficient::Field(v) => {
                let parts: Vec<String> = v.iter().map(|c| c.to_string()).collect();
                write!(f, "[{}]", parts.join(","))
            }
        }
    }
}

/// A finite Newton-Puiseux series `Σ c_a x^a` with positive exponents.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NpSeries {
    char: u64,
    terms: Vec<(Rational, Coefficient)>,
    n: u64,
}

fn lcm_denominators<'a>(exps: impl Iterator<Item = &'a Rational>) -> Result<u64> {
    let mut n = 1u64;
    for a in exps {
        n = n.lcm(&a.denom_u64().ok_or(Error::Overflow("denominator"))?);
    }
    Ok(n)
}

fn check_char(char: u64) -> Result<()> {
    if char != 0 && !is_prime_u64(char) {
        return Err(Error::Domain(format!("characteristic {char} is neither 0 nor prime")));
    }
    Ok(())
}

impl NpSeries {
    /// Builds a series from `(exponent, coefficient)` pairs; coefficients are read mod `char`.
    pub fn new(char: u64, terms: &[(Rational, Rational)]) -> Result<NpSeries> {
        check_char(char)?;
        let mut map: BTreeMap<Rational, Coefficient> = BTreeMap::new();
        for (a, c) in terms {
            if !a.is_positive() {
                return Err(Error::Domain(format!("exponent {a} is not positive")));
            }
            let coef = if char == 0 {
                Coefficient::from_rational(c)?
            } else {
                let v = c
                    .to_integer()
                    .ok_or_else(|| Error::Domain(format!("coefficient {c} is not an integer")))?;
                let r = (v % num_bigint::BigInt::from(char) + num_bigint::BigInt::from(char)) % num_bigint::BigInt::from(char);
                let r: u64 = r.try_into().expect("reduced residue fits");
                if r == 0 {
                    return Err(Error::Domain(format!("coefficient {c} vanishes mod {char}")));
                }
                Coefficient::Field(vec![r])
            };
            if map.insert(a.clone(), coef).is_some() {
                return Err(Error::Domain(format!("duplicate exponent {a}")));
            }
        }
        let n = lcm_denominators(map.keys())?;
        Ok(NpSeries { char, terms: map.into_iter().collect(), n })
    }

    /// Parses `c*x^(a/b) + ...`; the literal `0` is the zero series.
    pub fn parse(text: &str, char: u64) -> Result<NpSeries> {
        let terms = parse_terms(text)?;
        NpSeries::new(char, &terms)
    }

    pub fn char(&self) -> u64 {
        self.char
    }

    pub fn terms(&self) -> &[(Rational, Coefficient)] {
        &self.terms
    }

    pub fn exponents(&self) -> Vec<Rational> {
        self.terms.iter().map(|t| t.0.clone()).collect()
    }

    /// Least common denominator of the exponents.
    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Characteristic exponents by the gcd-jump recursion on `n · exponents`.
    pub fn char_exponents(&self) -> Vec<Rational> {
        self.char_data().0
    }

    /// Characteristic exponents with the gcd chain `e_0 = n, e_1, ...`.
    fn char_data(&self) -> (Vec<Rational>, Vec<u64>) {
        let n = self.n;
        let nums: Vec<u64> = self
            .terms
            .iter()
            .map(|(a, _)| (a * Rational::from(n)).to_u64().expect("exponent times n is integral"))
            .collect();
        let mut e = vec![n];
        let mut out = Vec::new();
        while *e.last().unwrap() != 1 {
            let cur = *e.last().unwrap();
            let Some(&b) = nums.iter().find(|&&b| b % cur != 0) else { break };
            e.push(cur.gcd(&b));
            out.push(Rational::new(b, n));
        }
        (out, e)
    }

    /// `n[:p]`, the number of distinct conjugates.
    pub fn conjugate_count(&self) -> u64 {
        coprime_part_char(self.n, self.char)
    }

    /// The distinct conjugates `ξ(ρ x^{1/n})`, `ρ` running over the `n[:p]` roots of unity.
    pub fn conjugates(&self) -> Result<Vec<NpSeries>> {
        let count = self.conjugate_count();
        if self.char == 0 {
            return Ok((0..count)
                .map(|k| {
                    let terms = self
                        .terms
                        .iter()
                        .map(|(a, c)| {
                            let Coefficient::Polar { magnitude, angle } = c else { unreachable!() };
                            let t = angle + a * Rational::from(k);
                            (a.clone(), Coefficient::Polar { magnitude: magnitude.clone(), angle: t.fract_pos() })
                        })
                        .collect();
                    NpSeries { char: 0, terms, n: self.n }
                })
                .collect());
        }
        let field = FiniteField::for_roots_of_unity(self.char, count)?;
        let zeta = field.root_of_unity(count)?;
        let lift = |v: &FfElem| {
            let mut x = field.zero();
            for (i, &c) in v.iter().enumerate().take(x.len()) {
                x[i] = c;
            }
            x
        };
        let mut out = Vec::new();
        for k in 0..count {
            let terms = self
                .terms
                .iter()
                .map(|(a, c)| {
                    let Coefficient::Field(v) = c else { unreachable!() };
                    let j = (a * Rational::from(self.n)).to_u64().expect("integral");
                    let rho = field.pow(&zeta, (k * j) % count);
                    (a.clone(), Coefficient::Field(field.mul(&lift(v), &rho)))
                })
                .collect();
            out.push(NpSeries { char: self.char, terms, n: self.n });
        }
        Ok(out)
    }

    /// Order in `x` of `self - other`.
    pub fn valuation_of_difference(&self, other: &NpSeries) -> ExtRational {
        let a: BTreeMap<&Rational, &Coefficient> = self.terms.iter().map(|(e, c)| (e, c)).collect();
        let b: BTreeMap<&Rational, &Coefficient> = other.terms.iter().map(|(e, c)| (e, c)).collect();
        let mut exps: Vec<&Rational> = a.keys().chain(b.keys()).copied().collect();
        exps.sort();
        exps.dedup();
        for e in exps {
            let same = match (a.get(e), b.get(e)) {
                (Some(x), Some(y)) => x.same(y),
                _ => false,
            };
            if !same {
                return ExtRational::Finite(e.clone());
            }
        }
        ExtRational::Infinity
    }
}

impl std::fmt::Display for NpSeries {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.terms.iter().map(|(a, c)| format!("{c}*x^({a})")).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

fn same_char(a: &NpSeries, b: &NpSeries) -> Result<()> {
    if a.char != b.char {
        return Err(Error::Domain("series live in different characteristics".into()));
    }
    Ok(())
}

/// Largest order of coincidence between conjugates of `s1` and `s2`.
pub fn coincidence_order(s1: &NpSeries, s2: &NpSeries) -> Result<ExtRational> {
    same_char(s1, s2)?;
    let best = s1
        .conjugates()?
        .iter()
        .map(|c| c.valuation_of_difference(s2))
        .max()
        .expect("at least one conjugate");
    if best.is_infinite() {
        return Err(Error::Domain(format!("{s1} and {s2} define the same branch")));
    }
    Ok(best)
}

/// Intersection number of the branches defined by two series, from the valuation of
/// the resultant: a sum over conjugates of orders of differences.
pub fn intersection_oracle(s1: &NpSeries, s2: &NpSeries) -> Result<u64> {
    same_char(s1, s2)?;
    let c1 = s1.conjugates()?;
    let mut total = Rational::zero();
    if s1.char == 0 {
        for a in &c1 {
            for b in s2.conjugates()? {
                match a.valuation_of_difference(&b) {
                    ExtRational::Finite(v) => total = total + v,
                    ExtRational::Infinity => return Err(Error::Domain("the branches coincide".into())),
                }
            }
        }
    } else {
        let wild = s1.n / s1.conjugate_count();
        for a in &c1 {
            match a.valuation_of_difference(s2) {
                ExtRational::Finite(v) => total = total + v * Rational::from(wild),
                ExtRational::Infinity => return Err(Error::Domain("the branches coincide".into())),
            }
        }
        total = total * Rational::from(s2.n);
    }
    total
        .to_u64()
        .filter(|_| total.is_integer())
        .ok_or_else(|| Error::Domain(format!("non-integral intersection {total}")))
}

/// Branch profile of a series: characteristic exponents with indices `(e_0/e_i)[:p]`.
pub fn series_profile(label: &str, s: &NpSeries) -> BranchProfile {
    let (exps, e) = s.char_data();
    let marks = exps
        .into_iter()
        .enumerate()
        .map(|(i, a)| (a, coprime_part_char(e[0] / e[i + 1], s.char)))
        .collect();
    BranchProfile { label: label.to_string(), marks, leaf_index: s.n, curvetta: false }
}

/// The Eggers-Wall tree of a family of series; in characteristic p indices are replaced
/// by their parts prime to p and leaves remember `n = (L·A)`.
pub fn ew_from_series(root: &str, branches: &[(String, NpSeries)]) -> Result<EwTree> {
    let profiles: Vec<BranchProfile> = branches.iter().map(|(l, s)| series_profile(l, s)).collect();
    let k = branches.len();
    let mut table = vec![vec![ExtRational::Infinity; k]; k];
    for l in 0..k {
        for m in 0..l {
            let c = coincidence_order(&branches[l].1, &branches[m].1)?;
            table[l][m] = c.clone();
            table[m][l] = c;
        }
    }
    ew_from_profiles(root, &profiles, &table)
}

/// A monic polynomial in `y` over `K[[x]]`, truncated: `(i, j, c)` is `c x^i y^j`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlanePoly {
    pub char: u64,
    pub monomials: Vec<Monomial>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Monomial {
    pub i: u64,
    pub j: u64,
    pub c: i64,
}

impl PlanePoly {
    fn support(&self) -> BTreeMap<(u64, u64), i64> {
        let mut m: BTreeMap<(u64, u64), i64> = BTreeMap::new();
        for t in &self.monomials {
            *m.entry((t.i, t.j)).or_insert(0) += t.c;
        }
        let p = self.char as i64;
        m.into_iter()
            .map(|(k, c)| (k, if p == 0 { c } else { c.rem_euclid(p) }))
            .filter(|&(_, c)| c != 0)
            .collect()
    }

    /// Degree in `y`, checking that the polynomial is monic.
    pub fn y_degree(&self) -> Result<u64> {
        let s = self.support();
        let n = s.keys().map(|k| k.1).max().ok_or_else(|| Error::Domain("zero polynomial".into()))?;
        let lead: Vec<(&(u64, u64), &i64)> = s.iter().filter(|(k, _)| k.1 == n).collect();
        if lead.len() != 1 || lead[0].0 .0 != 0 || *lead[0].1 != 1 {
            return Err(Error::Domain("polynomial is not monic in y".into()));
        }
        Ok(n)
    }
}

/// Whether an irreducible monic polynomial has a Newton-Puiseux root: every y-exponent
/// must be divisible by `p^{ν_p(n)}`. Irreducibility is the caller's responsibility.
pub fn has_np_root(poly: &PlanePoly) -> Result<bool> {
    check_char(poly.char)?;
    let n = poly.y_degree()?;
    if poly.char == 0 {
        return Ok(true);
    }
    let q = n / coprime_part_char(n, poly.char);
    Ok(poly.support().keys().all(|&(_, j)| j % q == 0))
}

fn parse_terms(text: &str) -> Result<Vec<(Rational, Rational)>> {
    let mut p = Parser { s: text.as_bytes(), pos: 0 };
    p.skip_ws();
    if p.peek() == Some(b'0') {
        let save = p.pos;
        p.pos += 1;
        p.skip_ws();
        if p.peek().is_none() {
            return Ok(Vec::new());
        }
        p.pos = save;
    }
    let mut terms = Vec::new();
    let mut first = true;
    loop {
        p.skip_ws();
        let mut sign = 1i64;
        match p.peek() {
            Some(b'+') if !first => p.pos += 1,
            Some(b'-') => {
                sign = -1;
                p.pos += 1;
            }
            None if first => return Err(p.err("empty series")),
            _ if !first => return Err(p.err("expected '+' or '-'")),
            _ => {}
        }
        p.skip_ws();
        let coef = if p.peek().is_some_and(|c| c.is_ascii_digit() || c == b'(') {
            let c = p.rational()?;
            p.skip_ws();
            if p.peek() == Some(b'*') {
                p.pos += 1;
                p.skip_ws();
            }
            c
        } else {
            Rational::one()
        };
        if p.peek() != Some(b'x') {
            return Err(p.err("expected 'x'"));
        }
        p.pos += 1;
        p.skip_ws();
        let exp = if p.peek() == Some(b'^') {
            p.pos += 1;
            p.skip_ws();
            p.rational()?
        } else {
            Rational::one()
        };
        terms.push((exp, coef * Rational::from(sign)));
        first = false;
        p.skip_ws();
        if p.peek().is_none() {
            return Ok(terms);
        }
    }
}

struct Parser<'a> {
    s: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn peek(&self) -> Option<u8> {
        self.s.get(self.pos).copied()
    }

    fn skip_ws(&mut self) {
        while self.peek().is_some_and(|c| c.is_ascii_whitespace()) {
            self.pos += 1;
        }
    }

    fn err(&self, msg: &str) -> Error {
        Error::Parse { pos: self.pos, msg: msg.to_string() }
    }

    fn integer(&mut self) -> Result<num_bigint::BigInt> {
        let start = self.pos;
        if self.peek() == Some(b'-') {
            self.pos += 1;
        }
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        std::str::from_utf8(&self.s[start..self.pos])
            .ok()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| Error::Parse { pos: start, msg: "expected an integer".into() })
    }

    /// `k`, `(k)`, `(a/b)` or `a/b` when unparenthesized.
    fn rational(&mut self) -> Result<Rational> {
        let paren = self.peek() == Some(b'(');
        if paren {
            self.pos += 1;
            self.skip_ws();
        }
        let num = self.integer()?;
        self.skip_ws();
        let mut den = num_bigint::BigInt::from(1);
        if self.peek() == Some(b'/') {
            self.pos += 1;
            self.skip_ws();
            den = self.integer()?;
            if den.is_zero() {
                return Err(self.err("zero denominator"));
            }
        }
        if paren {
            self.skip_ws();
            if self.peek() != Some(b')') {
                return Err(self.err("expected ')'"));
            }
            self.pos += 1;
        }
        Ok(Rational::new(num, den))
    }
}
