//! The truncated deformation base `B = Q[q1..qg] / (monomial ideal + m^N)`.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use smallvec::SmallVec;

use crate::error::{Error, Result};

pub type Q = BigRational;

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn qf(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

pub fn parse_rational(s: &str) -> Option<Q> {
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((a, b)) => (a.trim(), b.trim()),
        None => (s, "1"),
    };
    let num: BigInt = num.parse().ok()?;
    let den: BigInt = den.parse().ok()?;
    if den.is_zero() {
        return None;
    }
    Some(Q::new(num, den))
}

/// Exponent vector with trailing zeros removed, so the constant monomial is empty.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default)]
pub struct Monomial(SmallVec<[u16; 4]>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(SmallVec::new())
    }

    pub fn from_exponents(exps: &[u32]) -> Self {
        let mut v: SmallVec<[u16; 4]> = exps.iter().map(|&e| e as u16).collect();
        while v.last() == Some(&0) {
            v.pop();
        }
        Monomial(v)
    }

    pub fn var(i: usize) -> Self {
        let mut v: SmallVec<[u16; 4]> = SmallVec::from_elem(0, i + 1);
        v[i] = 1;
        Monomial(v)
    }

    pub fn exponent(&self, i: usize) -> u32 {
        self.0.get(i).copied().unwrap_or(0) as u32
    }

    pub fn exponents(&self, num_vars: usize) -> Vec<u32> {
        (0..num_vars).map(|i| self.exponent(i)).collect()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|&e| e as u32).sum()
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn num_vars_used(&self) -> usize {
        self.0.len()
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        self.0.len() <= other.0.len() && self.0.iter().zip(other.0.iter()).all(|(a, b)| a <= b)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let n = self.0.len().max(other.0.len());
        let v = (0..n)
            .map(|i| self.0.get(i).copied().unwrap_or(0) + other.0.get(i).copied().unwrap_or(0))
            .collect();
        Monomial(v)
    }

    pub fn div(&self, other: &Monomial) -> Option<Monomial> {
        if !other.divides(self) {
            return None;
        }
        let mut v: SmallVec<[u16; 4]> = self
            .0
            .iter()
            .enumerate()
            .map(|(i, &e)| e - other.0.get(i).copied().unwrap_or(0))
            .collect();
        while v.last() == Some(&0) {
            v.pop();
        }
        Some(Monomial(v))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_one() {
            return write!(f, "1");
        }
        let mut first = true;
        for (i, &e) in self.0.iter().enumerate() {
            if e == 0 {
                continue;
            }
            if !first {
                write!(f, "*")?;
            }
            first = false;
            if e == 1 {
                write!(f, "q{}", i + 1)?;
            } else {
                write!(f, "q{}^{}", i + 1, e)?;
            }
        }
        Ok(())
    }
}

/// m-adic order of an element: `Infinite` for zero.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
pub enum Order {
    Finite(u32),
    Infinite,
}

impl Order {
    pub fn at_least(self, k: u32) -> bool {
        match self {
            Order::Finite(n) => n >= k,
            Order::Infinite => true,
        }
    }
}

impl fmt::Display for Order {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Order::Finite(n) => write!(f, "{n}"),
            Order::Infinite => write!(f, "inf"),
        }
    }
}

/// Ring context: number of variables, truncation order `N` and monomial relations.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct BaseSpec {
    num_vars: usize,
    truncation: u32,
    relations: Vec<Monomial>,
}

impl BaseSpec {
    pub fn new(num_vars: usize, truncation: u32, relations: &[Vec<u32>]) -> Result<Self> {
        if num_vars == 0 {
            return Err(Error::InvalidBase("at least one variable is required".into()));
        }
        if truncation == 0 {
            return Err(Error::InvalidBase("truncation order must be at least 1".into()));
        }
        let mut rels: Vec<Monomial> = Vec::new();
        for r in relations {
            if r.len() != num_vars {
                return Err(Error::InvalidBase(format!(
                    "relation {r:?} has {} exponents, expected {num_vars}",
                    r.len()
                )));
            }
            let m = Monomial::from_exponents(r);
            if m.degree() == 0 {
                return Err(Error::InvalidBase("relation of degree 0 kills the base".into()));
            }
            if m.degree() < truncation {
                rels.push(m);
            }
        }
        rels.sort();
        rels.dedup();
        let reduced: Vec<Monomial> = rels
            .iter()
            .filter(|m| !rels.iter().any(|o| o != *m && o.divides(m)))
            .cloned()
            .collect();
        Ok(BaseSpec { num_vars, truncation, relations: reduced })
    }

    /// The residue field `Q` itself: one variable truncated at order 1.
    pub fn rational() -> Self {
        BaseSpec { num_vars: 1, truncation: 1, relations: Vec::new() }
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn truncation(&self) -> u32 {
        self.truncation
    }

    pub fn relations(&self) -> &[Monomial] {
        &self.relations
    }

    pub fn is_normal(&self, m: &Monomial) -> bool {
        m.num_vars_used() <= self.num_vars
            && m.degree() < self.truncation
            && !self.relations.iter().any(|r| r.divides(m))
    }

    /// All normal monomials of total degree `d`, in lexicographic order.
    pub fn monomials_of_degree(&self, d: u32) -> Vec<Monomial> {
        let mut out = Vec::new();
        let mut exps = vec![0u32; self.num_vars];
        fn rec(i: usize, left: u32, exps: &mut Vec<u32>, out: &mut Vec<Monomial>) {
            if i + 1 == exps.len() {
                exps[i] = left;
                out.push(Monomial::from_exponents(exps));
                return;
            }
            for e in 0..=left {
                exps[i] = e;
                rec(i + 1, left - e, exps, out);
            }
            exps[i] = 0;
        }
        rec(0, d, &mut exps, &mut out);
        out.retain(|m| self.is_normal(m));
        out.sort();
        out
    }

    /// Every normal monomial, ordered by degree then lexicographically.
    pub fn normal_monomials(&self) -> Vec<Monomial> {
        (0..self.truncation).flat_map(|d| self.monomials_of_degree(d)).collect()
    }

    pub fn var(&self, i: usize) -> Coefficient {
        let m = Monomial::var(i);
        if i < self.num_vars && self.is_normal(&m) {
            Coefficient::monomial(m, Q::one())
        } else {
            Coefficient::zero()
        }
    }

    pub fn check(&self, c: &Coefficient) -> Result<()> {
        for m in c.terms.keys() {
            if !self.is_normal(m) {
                return Err(Error::NotNormal(format!("monomial {m}")));
            }
        }
        Ok(())
    }

    /// Projects a coefficient into this base by deleting non-normal terms.
    pub fn reduce(&self, c: &Coefficient) -> Coefficient {
        let terms = c
            .terms
            .iter()
            .filter(|(m, _)| self.is_normal(m))
            .map(|(m, v)| (m.clone(), v.clone()))
            .collect();
        Coefficient { terms }
    }

    pub fn mul(&self, a: &Coefficient, b: &Coefficient) -> Coefficient {
        if a.is_zero() || b.is_zero() {
            return Coefficient::zero();
        }
        if let (Some(x), Some(y)) = (a.as_constant(), b.as_constant()) {
            return Coefficient::constant(x * y);
        }
        let mut terms: BTreeMap<Monomial, Q> = BTreeMap::new();
        for (ma, ca) in &a.terms {
            for (mb, cb) in &b.terms {
                if ma.degree() + mb.degree() >= self.truncation {
                    continue;
                }
                let m = ma.mul(mb);
                if !self.is_normal(&m) {
                    continue;
                }
                let entry = terms.entry(m).or_insert_with(Q::zero);
                *entry += ca * cb;
            }
        }
        terms.retain(|_, v| !v.is_zero());
        Coefficient { terms }
    }

    /// Divides every term by the monomial `m`. Terms of the quotient only determine it
    /// up to degree `N - |m|`; information above that was never representable.
    pub fn divide_monomial(&self, a: &Coefficient, m: &[u32]) -> Result<Coefficient> {
        let d = Monomial::from_exponents(m);
        let mut terms = BTreeMap::new();
        for (t, c) in &a.terms {
            match t.div(&d) {
                Some(qt) => {
                    terms.insert(qt, c.clone());
                }
                None => {
                    return Err(Error::NotDivisible { term: t.to_string(), divisor: d.to_string() })
                }
            }
        }
        Ok(Coefficient { terms })
    }

    /// Parses the textual form, e.g. `1 - 3/2 q1^2*q2`.
    pub fn parse(&self, s: &str) -> Result<Coefficient> {
        let err = || Error::Invalid(format!("cannot parse coefficient {s:?}"));
        let s = s.trim();
        if s.is_empty() {
            return Err(err());
        }
        let mut chunks: Vec<(bool, String)> = Vec::new();
        let mut rest = s;
        let mut neg = false;
        if let Some(r) = rest.strip_prefix('-') {
            neg = true;
            rest = r.trim_start();
        }
        loop {
            let plus = rest.find(" + ");
            let minus = rest.find(" - ");
            let next = match (plus, minus) {
                (Some(p), Some(m)) => Some(p.min(m)),
                (a, b) => a.or(b),
            };
            match next {
                Some(i) => {
                    chunks.push((neg, rest[..i].trim().to_string()));
                    neg = &rest[i..i + 3] == " - ";
                    rest = rest[i + 3..].trim_start();
                }
                None => {
                    chunks.push((neg, rest.trim().to_string()));
                    break;
                }
            }
        }
        let mut out = Coefficient::zero();
        for (neg, chunk) in chunks {
            let (coef, mono) = match chunk.split_once(' ') {
                Some((a, b)) => (parse_rational(a).ok_or_else(err)?, b.trim().to_string()),
                None => match parse_rational(&chunk) {
                    Some(c) => (c, String::new()),
                    None => (Q::one(), chunk.clone()),
                },
            };
            let mut exps = vec![0u32; self.num_vars];
            if !mono.is_empty() {
                for factor in mono.split('*') {
                    let (var, e) = match factor.split_once('^') {
                        Some((v, e)) => (v, e.parse::<u32>().map_err(|_| err())?),
                        None => (factor, 1),
                    };
                    let idx: usize = var.strip_prefix('q').ok_or_else(err)?.parse().map_err(|_| err())?;
                    if idx == 0 || idx > self.num_vars {
                        return Err(err());
                    }
                    exps[idx - 1] += e;
                }
            }
            let m = Monomial::from_exponents(&exps);
            let c = if neg { -coef } else { coef };
            if self.is_normal(&m) {
                out += &Coefficient::monomial(m, c);
            }
        }
        Ok(out)
    }
}

/// An element of the truncated base in normal form.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct Coefficient {
    terms: BTreeMap<Monomial, Q>,
}

impl Coefficient {
    pub fn zero() -> Self {
        Coefficient { terms: BTreeMap::new() }
    }

    pub fn one() -> Self {
        Self::constant(Q::one())
    }

    pub fn constant(c: Q) -> Self {
        Self::monomial(Monomial::one(), c)
    }

    pub fn int(n: i64) -> Self {
        Self::constant(q(n))
    }

    pub fn monomial(m: Monomial, c: Q) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Coefficient { terms }
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (Monomial, Q)>) -> Self {
        let mut out = Coefficient::zero();
        for (m, c) in terms {
            out += &Coefficient::monomial(m, c);
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Q)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn as_constant(&self) -> Option<Q> {
        match self.terms.len() {
            0 => Some(Q::zero()),
            1 => {
                let (m, c) = self.terms.iter().next().unwrap();
                m.is_one().then(|| c.clone())
            }
            _ => None,
        }
    }

    pub fn constant_term(&self) -> Q {
        self.terms.get(&Monomial::one()).cloned().unwrap_or_else(Q::zero)
    }

    pub fn coefficient_of(&self, m: &Monomial) -> Q {
        self.terms.get(m).cloned().unwrap_or_else(Q::zero)
    }

    pub fn madic_order(&self) -> Order {
        self.terms.keys().map(|m| m.degree()).min().map_or(Order::Infinite, Order::Finite)
    }

    /// Homogeneous part of total degree `d`.
    pub fn slice(&self, d: u32) -> Coefficient {
        let terms = self
            .terms
            .iter()
            .filter(|(m, _)| m.degree() == d)
            .map(|(m, c)| (m.clone(), c.clone()))
            .collect();
        Coefficient { terms }
    }

    /// Part of total degree below `d`.
    pub fn below(&self, d: u32) -> Coefficient {
        let terms = self
            .terms
            .iter()
            .filter(|(m, _)| m.degree() < d)
            .map(|(m, c)| (m.clone(), c.clone()))
            .collect();
        Coefficient { terms }
    }

    pub fn scale(&self, c: &Q) -> Coefficient {
        if c.is_zero() {
            return Coefficient::zero();
        }
        let terms = self.terms.iter().map(|(m, v)| (m.clone(), v * c)).collect();
        Coefficient { terms }
    }

    /// Multiplies by a single monomial term, dropping anything outside the base.
    pub fn shift_by(&self, base: &BaseSpec, m: &Monomial) -> Coefficient {
        let terms = self
            .terms
            .iter()
            .map(|(t, c)| (t.mul(m), c.clone()))
            .filter(|(t, _)| base.is_normal(t))
            .collect();
        Coefficient { terms }
    }
}

impl fmt::Display for Coefficient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (m, c)) in self.terms.iter().enumerate() {
            let neg = c.is_negative();
            let abs = c.abs();
            if i == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else if neg {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            if m.is_one() {
                write!(f, "{abs}")?;
            } else if abs.is_one() {
                write!(f, "{m}")?;
            } else {
                write!(f, "{abs} {m}")?;
            }
        }
        Ok(())
    }
}

impl AddAssign<&Coefficient> for Coefficient {
    fn add_assign(&mut self, rhs: &Coefficient) {
        for (m, c) in &rhs.terms {
            match self.terms.get_mut(m) {
                Some(v) => {
                    *v += c;
                    if v.is_zero() {
                        self.terms.remove(m);
                    }
                }
                None => {
                    self.terms.insert(m.clone(), c.clone());
                }
            }
        }
    }
}

impl SubAssign<&Coefficient> for Coefficient {
    fn sub_assign(&mut self, rhs: &Coefficient) {
        *self += &(-rhs);
    }
}

impl Add for &Coefficient {
    type Output = Coefficient;
    fn add(self, rhs: &Coefficient) -> Coefficient {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Sub for &Coefficient {
    type Output = Coefficient;
    fn sub(self, rhs: &Coefficient) -> Coefficient {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl Neg for &Coefficient {
    type Output = Coefficient;
    fn neg(self) -> Coefficient {
        let terms = self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect();
        Coefficient { terms }
    }
}

impl Neg for Coefficient {
    type Output = Coefficient;
    fn neg(self) -> Coefficient {
        -&self
    }
}
