//! Based graded vector spaces and B-linear maps between their extensions.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::base::{BaseSpec, Coefficient, Monomial, Order, Q};
use crate::error::{Error, Result};
use crate::linalg::QMatrix;

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub enum GradingMode {
    Z,
    Z2,
}

impl GradingMode {
    pub fn normalize(self, d: i64) -> i64 {
        match self {
            GradingMode::Z => d,
            GradingMode::Z2 => d.rem_euclid(2),
        }
    }

    pub fn same(self, a: i64, b: i64) -> bool {
        self.normalize(a) == self.normalize(b)
    }
}

/// Parity of an integer as a sign exponent.
pub fn parity(n: i64) -> bool {
    n.rem_euclid(2) == 1
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct BasisElement {
    pub name: String,
    pub degree: i64,
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct GradedBasis {
    elements: Vec<BasisElement>,
    mode: GradingMode,
}

impl GradedBasis {
    pub fn new(mode: GradingMode, elements: Vec<(String, i64)>) -> Result<Self> {
        let mut seen = std::collections::BTreeSet::new();
        let mut out = Vec::with_capacity(elements.len());
        for (name, degree) in elements {
            if !seen.insert(name.clone()) {
                return Err(Error::Invalid(format!("duplicate basis name {name}")));
            }
            out.push(BasisElement { name, degree: mode.normalize(degree) });
        }
        Ok(GradedBasis { elements: out, mode })
    }

    pub fn empty(mode: GradingMode) -> Self {
        GradedBasis { elements: Vec::new(), mode }
    }

    pub fn dim(&self) -> usize {
        self.elements.len()
    }

    pub fn mode(&self) -> GradingMode {
        self.mode
    }

    pub fn elements(&self) -> &[BasisElement] {
        &self.elements
    }

    pub fn degree(&self, i: usize) -> i64 {
        self.elements[i].degree
    }

    pub fn name(&self, i: usize) -> &str {
        &self.elements[i].name
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.elements.iter().position(|e| e.name == name)
    }
}

/// An element of `B ⊗ V` for a based space `V`, stored by basis index.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct VectorB {
    coords: BTreeMap<usize, Coefficient>,
}

impl VectorB {
    pub fn zero() -> Self {
        VectorB { coords: BTreeMap::new() }
    }

    pub fn unit(i: usize) -> Self {
        Self::single(i, Coefficient::one())
    }

    pub fn single(i: usize, c: Coefficient) -> Self {
        let mut v = Self::zero();
        v.add_at(i, &c);
        v
    }

    pub fn from_q(v: &[Q]) -> Self {
        let mut out = Self::zero();
        for (i, x) in v.iter().enumerate() {
            if !x.is_zero() {
                out.coords.insert(i, Coefficient::constant(x.clone()));
            }
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn get(&self, i: usize) -> Coefficient {
        self.coords.get(&i).cloned().unwrap_or_default()
    }

    pub fn get_ref(&self, i: usize) -> Option<&Coefficient> {
        self.coords.get(&i)
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, &Coefficient)> {
        self.coords.iter().map(|(&i, c)| (i, c))
    }

    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.coords.keys().copied()
    }

    pub fn max_index(&self) -> Option<usize> {
        self.coords.keys().next_back().copied()
    }

    pub fn add_at(&mut self, i: usize, c: &Coefficient) {
        if c.is_zero() {
            return;
        }
        match self.coords.get_mut(&i) {
            Some(v) => {
                *v += c;
                if v.is_zero() {
                    self.coords.remove(&i);
                }
            }
            None => {
                self.coords.insert(i, c.clone());
            }
        }
    }

    pub fn add_assign(&mut self, other: &VectorB) {
        for (i, c) in &other.coords {
            self.add_at(*i, c);
        }
    }

    pub fn sub_assign(&mut self, other: &VectorB) {
        for (i, c) in &other.coords {
            self.add_at(*i, &-c);
        }
    }

    /// `self += c * other`.
    pub fn add_scaled(&mut self, base: &BaseSpec, c: &Coefficient, other: &VectorB) {
        if c.is_zero() {
            return;
        }
        if let Some(k) = c.as_constant() {
            if k.is_one() {
                self.add_assign(other);
                return;
            }
            for (i, x) in &other.coords {
                self.add_at(*i, &x.scale(&k));
            }
            return;
        }
        for (i, x) in &other.coords {
            self.add_at(*i, &base.mul(c, x));
        }
    }

    pub fn add(&self, other: &VectorB) -> VectorB {
        let mut out = self.clone();
        out.add_assign(other);
        out
    }

    pub fn sub(&self, other: &VectorB) -> VectorB {
        let mut out = self.clone();
        out.sub_assign(other);
        out
    }

    pub fn neg(&self) -> VectorB {
        VectorB { coords: self.coords.iter().map(|(&i, c)| (i, -c)).collect() }
    }

    pub fn scale(&self, base: &BaseSpec, c: &Coefficient) -> VectorB {
        let mut out = VectorB::zero();
        out.add_scaled(base, c, self);
        out
    }

    pub fn scale_q(&self, c: &Q) -> VectorB {
        let mut out = VectorB::zero();
        for (&i, x) in &self.coords {
            out.add_at(i, &x.scale(c));
        }
        out
    }

    pub fn madic_order(&self) -> Order {
        self.coords.values().map(|c| c.madic_order()).min().unwrap_or(Order::Infinite)
    }

    /// Constant part as a rational vector of length `dim`.
    pub fn leading(&self, dim: usize) -> Vec<Q> {
        let mut v = vec![Q::zero(); dim];
        for (&i, c) in &self.coords {
            v[i] = c.constant_term();
        }
        v
    }

    pub fn leading_vector(&self) -> VectorB {
        let mut out = VectorB::zero();
        for (&i, c) in &self.coords {
            out.add_at(i, &Coefficient::constant(c.constant_term()));
        }
        out
    }

    /// Homogeneous m-degree `d` part.
    pub fn slice(&self, d: u32) -> VectorB {
        let mut out = VectorB::zero();
        for (&i, c) in &self.coords {
            out.add_at(i, &c.slice(d));
        }
        out
    }

    /// Rational coordinate vectors, one per monomial occurring in the coordinates.
    pub fn by_monomial(&self, dim: usize) -> BTreeMap<Monomial, Vec<Q>> {
        let mut out: BTreeMap<Monomial, Vec<Q>> = BTreeMap::new();
        for (&i, c) in &self.coords {
            for (m, x) in c.terms() {
                out.entry(m.clone()).or_insert_with(|| vec![Q::zero(); dim])[i] = x.clone();
            }
        }
        out
    }

    pub fn from_monomial_parts(parts: &BTreeMap<Monomial, Vec<Q>>) -> VectorB {
        let mut out = VectorB::zero();
        for (m, v) in parts {
            for (i, x) in v.iter().enumerate() {
                if !x.is_zero() {
                    out.add_at(i, &Coefficient::monomial(m.clone(), x.clone()));
                }
            }
        }
        out
    }

    /// Multiplies every coordinate by a monomial.
    pub fn shift_by(&self, base: &BaseSpec, m: &Monomial) -> VectorB {
        let mut out = VectorB::zero();
        for (&i, c) in &self.coords {
            out.add_at(i, &c.shift_by(base, m));
        }
        out
    }

    /// Keeps only coordinates in the given index set, reindexed by position.
    pub fn restrict(&self, indices: &[usize]) -> VectorB {
        let mut out = VectorB::zero();
        for (pos, &i) in indices.iter().enumerate() {
            if let Some(c) = self.coords.get(&i) {
                out.add_at(pos, c);
            }
        }
        out
    }

    pub fn reindex(&self, f: impl Fn(usize) -> usize) -> VectorB {
        let mut out = VectorB::zero();
        for (&i, c) in &self.coords {
            out.add_at(f(i), c);
        }
        out
    }

    pub fn format_with(&self, basis: &GradedBasis) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let parts: Vec<String> =
            self.coords.iter().map(|(&i, c)| format!("({c})*{}", basis.name(i))).collect();
        parts.join(" + ")
    }
}

impl fmt::Display for VectorB {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.coords.iter().map(|(&i, c)| format!("({c})*e{i}")).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// A B-linear map `B ⊗ V → B ⊗ W` as a sparse matrix.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct LinearMapB {
    rows: usize,
    cols: usize,
    entries: BTreeMap<(usize, usize), Coefficient>,
    pub degree_shift: i64,
}

impl LinearMapB {
    pub fn zero(rows: usize, cols: usize) -> Self {
        LinearMapB { rows, cols, entries: BTreeMap::new(), degree_shift: 0 }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zero(n, n);
        for i in 0..n {
            m.set(i, i, Coefficient::one());
        }
        m
    }

    pub fn from_q(a: &QMatrix) -> Self {
        let mut m = Self::zero(a.rows(), a.cols());
        for i in 0..a.rows() {
            for j in 0..a.cols() {
                m.set(i, j, Coefficient::constant(a.get(i, j).clone()));
            }
        }
        m
    }

    pub fn from_columns(rows: usize, cols: &[VectorB]) -> Self {
        let mut m = Self::zero(rows, cols.len());
        for (j, col) in cols.iter().enumerate() {
            for (i, c) in col.iter() {
                assert!(i < rows, "column entry out of range");
                m.set(i, j, c.clone());
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> Coefficient {
        self.entries.get(&(i, j)).cloned().unwrap_or_default()
    }

    pub fn set(&mut self, i: usize, j: usize, c: Coefficient) {
        if c.is_zero() {
            self.entries.remove(&(i, j));
        } else {
            self.entries.insert((i, j), c);
        }
    }

    pub fn entries(&self) -> impl Iterator<Item = (&(usize, usize), &Coefficient)> {
        self.entries.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn column(&self, j: usize) -> VectorB {
        let mut v = VectorB::zero();
        for (&(i, jj), c) in &self.entries {
            if jj == j {
                v.add_at(i, c);
            }
        }
        v
    }

    pub fn apply(&self, base: &BaseSpec, v: &VectorB) -> VectorB {
        let mut out = VectorB::zero();
        for (&(i, j), a) in &self.entries {
            if let Some(x) = v.get_ref(j) {
                out.add_at(i, &base.mul(a, x));
            }
        }
        out
    }

    /// `self ∘ other`.
    pub fn compose(&self, base: &BaseSpec, other: &LinearMapB) -> LinearMapB {
        assert_eq!(self.cols, other.rows, "dimension mismatch in composition");
        let mut by_row: BTreeMap<usize, Vec<(usize, &Coefficient)>> = BTreeMap::new();
        for (&(k, j), c) in &other.entries {
            by_row.entry(k).or_default().push((j, c));
        }
        let mut out = Self::zero(self.rows, other.cols);
        out.degree_shift = self.degree_shift + other.degree_shift;
        for (&(i, k), a) in &self.entries {
            if let Some(row) = by_row.get(&k) {
                for &(j, b) in row {
                    let cur = out.get(i, j);
                    out.set(i, j, &cur + &base.mul(a, b));
                }
            }
        }
        out
    }

    pub fn add(&self, other: &LinearMapB) -> LinearMapB {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let mut out = self.clone();
        for (&(i, j), c) in &other.entries {
            let cur = out.get(i, j);
            out.set(i, j, &cur + c);
        }
        out
    }

    pub fn sub(&self, other: &LinearMapB) -> LinearMapB {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> LinearMapB {
        let mut out = self.clone();
        for c in out.entries.values_mut() {
            *c = -&*c;
        }
        out
    }

    /// Rows and columns selected by index lists.
    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> LinearMapB {
        let mut out = Self::zero(rows.len(), cols.len());
        for (a, &i) in rows.iter().enumerate() {
            for (b, &j) in cols.iter().enumerate() {
                out.set(a, b, self.get(i, j));
            }
        }
        out
    }

    pub fn leading_q(&self) -> QMatrix {
        let mut m = QMatrix::zeros(self.rows, self.cols);
        for (&(i, j), c) in &self.entries {
            m.set(i, j, c.constant_term());
        }
        m
    }

    pub fn leading_term_map(&self) -> LinearMapB {
        let mut out = Self::from_q(&self.leading_q());
        out.degree_shift = self.degree_shift;
        out
    }

    pub fn invert_leading(&self, base: &BaseSpec) -> Result<LinearMapB> {
        if self.rows != self.cols {
            return Err(Error::SingularLeadingTerm);
        }
        let a0 = self.leading_q();
        let a0inv = LinearMapB::from_q(&a0.inverse().ok_or(Error::SingularLeadingTerm)?);
        let t = a0inv.compose(base, &self.sub(&LinearMapB::from_q(&a0)));
        let mut term = a0inv.clone();
        let mut acc = a0inv;
        for _ in 1..base.truncation() {
            term = t.compose(base, &term).neg();
            if term.is_zero() {
                break;
            }
            acc = acc.add(&term);
        }
        acc.degree_shift = -self.degree_shift;
        Ok(acc)
    }

    /// Solves `self(x) = y` order by order; `Ok(None)` when `y` is outside the image.
    pub fn preimage_under(&self, base: &BaseSpec, y: &VectorB) -> Result<Option<VectorB>> {
        let a0 = self.leading_q();
        if a0.rank() < self.cols {
            return Err(Error::NotInjective);
        }
        let mut x = VectorB::zero();
        for d in 0..base.truncation() {
            let residual = y.sub(&self.apply(base, &x)).slice(d);
            for (m, part) in residual.by_monomial(self.rows) {
                match a0.solve(&part) {
                    Some(u) => x.add_assign(&VectorB::from_q(&u).shift_by(base, &m)),
                    None => return Ok(None),
                }
            }
        }
        Ok((self.apply(base, &x) == *y).then_some(x))
    }

    pub fn madic_order(&self) -> Order {
        self.entries.values().map(|c| c.madic_order()).min().unwrap_or(Order::Infinite)
    }
}

impl fmt::Display for LinearMapB {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|j| self.get(i, j).to_string()).collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::base::q;
    use proptest::prelude::*;

    fn b(n: u32) -> BaseSpec {
        BaseSpec::new(1, n, &[]).unwrap()
    }

    fn mat(base: &BaseSpec, rows: &[&[&str]]) -> LinearMapB {
        let mut m = LinearMapB::zero(rows.len(), rows[0].len());
        for (i, r) in rows.iter().enumerate() {
            for (j, s) in r.iter().enumerate() {
                m.set(i, j, base.parse(s).unwrap());
            }
        }
        m
    }

    #[test]
    fn leading_term_examples() {
        let base = b(3);
        assert_eq!(mat(&base, &[&["1 + q1"]]).leading_term_map(), mat(&base, &[&["1"]]));
        assert!(mat(&base, &[&["q1"]]).leading_term_map().is_zero());
        let f = mat(&base, &[&["2", "q1"], &["0", "3 - q1^2"]]);
        assert_eq!(f.leading_term_map(), mat(&base, &[&["2", "0"], &["0", "3"]]));
    }

    #[test]
    fn invert_examples() {
        let base = b(3);
        let g = mat(&base, &[&["1 + q1"]]).invert_leading(&base).unwrap();
        assert_eq!(g, mat(&base, &[&["1 - q1 + q1^2"]]));
        assert_eq!(LinearMapB::identity(3).invert_leading(&base).unwrap(), LinearMapB::identity(3));
        let u = mat(&base, &[&["1", "q1"], &["0", "1"]]).invert_leading(&base).unwrap();
        assert_eq!(u, mat(&base, &[&["1", "-q1"], &["0", "1"]]));
        assert_eq!(mat(&base, &[&["q1"]]).invert_leading(&base), Err(Error::SingularLeadingTerm));
    }

    #[test]
    fn preimage_examples() {
        let base = b(3);
        let f = mat(&base, &[&["1"], &["0"]]);
        let y = VectorB::from_q(&[q(3), q(0)]);
        assert_eq!(f.preimage_under(&base, &y).unwrap(), Some(VectorB::from_q(&[q(3)])));
        let y2 = VectorB::single(1, base.var(0));
        assert_eq!(f.preimage_under(&base, &y2).unwrap(), None);
        let g = mat(&base, &[&["1 + q1"]]);
        let x = g.preimage_under(&base, &VectorB::unit(0)).unwrap().unwrap();
        assert_eq!(x, VectorB::single(0, base.parse("1 - q1 + q1^2").unwrap()));
    }

    #[test]
    fn empty_maps_are_legal() {
        let base = b(2);
        let e = LinearMapB::zero(0, 0);
        assert_eq!(e.invert_leading(&base).unwrap(), e);
        assert_eq!(e.preimage_under(&base, &VectorB::zero()).unwrap(), Some(VectorB::zero()));
    }

    fn arb_map(n: usize, unit_diag: bool) -> impl Strategy<Value = LinearMapB> {
        proptest::collection::vec(proptest::collection::vec(-3i64..4, 3), n * n).prop_map(move |cs| {
            let base = BaseSpec::new(1, 4, &[]).unwrap();
            let mut m = LinearMapB::zero(n, n);
            for (k, c) in cs.iter().enumerate() {
                let (i, j) = (k / n, k % n);
                let lead = if unit_diag { if i == j { 1 } else if i < j { c[0] } else { 0 } } else { c[0] };
                let s = format!("{} + {} q1 + {} q1^2", lead, c[1], c[2]);
                m.set(i, j, base.parse(&s.replace("+ -", "- ")).unwrap());
            }
            m
        })
    }

    proptest! {
        #[test]
        fn inverse_is_two_sided(f in arb_map(3, true)) {
            let base = BaseSpec::new(1, 4, &[]).unwrap();
            let g = f.invert_leading(&base).unwrap();
            prop_assert_eq!(f.compose(&base, &g), LinearMapB::identity(3));
            prop_assert_eq!(g.compose(&base, &f), LinearMapB::identity(3));
        }

        #[test]
        fn preimage_recovers(f in arb_map(3, true), xs in proptest::collection::vec(-3i64..4, 6)) {
            let base = BaseSpec::new(1, 4, &[]).unwrap();
            let mut x = VectorB::zero();
            for i in 0..3 {
                x.add_at(i, &base.parse(&format!("{} + {} q1", xs[2 * i], xs[2 * i + 1]).replace("+ -", "- ")).unwrap());
            }
            let y = f.apply(&base, &x);
            prop_assert_eq!(f.preimage_under(&base, &y).unwrap(), Some(x));
        }

        #[test]
        fn leading_is_idempotent(f in arb_map(2, false)) {
            let l = f.leading_term_map();
            prop_assert_eq!(l.leading_term_map(), l);
        }
    }
}
