use std::collections::BTreeMap;

use crate::base::{BaseSpec, Coefficient, Order, Q};
use crate::graded::VectorB;

use super::shape::{Gen, Morphism, Shape};

/// A family of multilinear maps given by values on composable basis tuples (path order),
/// plus nullary values per object.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct Multilinear {
    pub nullary: BTreeMap<usize, VectorB>,
    pub terms: BTreeMap<Vec<Gen>, VectorB>,
}

impl Multilinear {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn is_zero(&self) -> bool {
        self.nullary.is_empty() && self.terms.is_empty()
    }

    pub fn value(&self, key: &[Gen]) -> Option<&VectorB> {
        self.terms.get(key)
    }

    pub fn nullary_at(&self, x: usize) -> Option<&VectorB> {
        self.nullary.get(&x)
    }

    pub fn add_term(&mut self, key: Vec<Gen>, v: &VectorB) {
        if v.is_zero() {
            return;
        }
        match self.terms.get_mut(&key) {
            Some(cur) => {
                cur.add_assign(v);
                if cur.is_zero() {
                    self.terms.remove(&key);
                }
            }
            None => {
                self.terms.insert(key, v.clone());
            }
        }
    }

    pub fn add_nullary(&mut self, x: usize, v: &VectorB) {
        if v.is_zero() {
            return;
        }
        let cur = self.nullary.entry(x).or_default();
        cur.add_assign(v);
        if cur.is_zero() {
            self.nullary.remove(&x);
        }
    }

    pub fn max_arity(&self) -> usize {
        self.terms.keys().map(|k| k.len()).max().unwrap_or(0)
    }

    pub fn min_arity(&self) -> Option<usize> {
        if !self.nullary.is_empty() {
            return Some(0);
        }
        self.terms.keys().map(|k| k.len()).min()
    }

    pub fn arity_component(&self, k: usize) -> Multilinear {
        let mut out = Multilinear::new();
        if k == 0 {
            out.nullary = self.nullary.clone();
        } else {
            out.terms = self.terms.iter().filter(|(key, _)| key.len() == k).map(|(a, b)| (a.clone(), b.clone())).collect();
        }
        out
    }

    pub fn truncate_arity(&self, max: usize) -> Multilinear {
        Multilinear {
            nullary: self.nullary.clone(),
            terms: self.terms.iter().filter(|(k, _)| k.len() <= max).map(|(a, b)| (a.clone(), b.clone())).collect(),
        }
    }

    pub fn add(&self, other: &Multilinear) -> Multilinear {
        let mut out = self.clone();
        out.add_assign(other);
        out
    }

    pub fn add_assign(&mut self, other: &Multilinear) {
        for (x, v) in &other.nullary {
            self.add_nullary(*x, v);
        }
        for (k, v) in &other.terms {
            self.add_term(k.clone(), v);
        }
    }

    pub fn sub(&self, other: &Multilinear) -> Multilinear {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Multilinear {
        self.map_values(|v| v.neg())
    }

    pub fn scale(&self, base: &BaseSpec, c: &Coefficient) -> Multilinear {
        self.map_values(|v| v.scale(base, c))
    }

    pub fn scale_q(&self, c: &Q) -> Multilinear {
        self.map_values(|v| v.scale_q(c))
    }

    pub fn map_values(&self, f: impl Fn(&VectorB) -> VectorB) -> Multilinear {
        let mut out = Multilinear::new();
        for (x, v) in &self.nullary {
            out.add_nullary(*x, &f(v));
        }
        for (k, v) in &self.terms {
            out.add_term(k.clone(), &f(v));
        }
        out
    }

    /// Constant parts of every value.
    pub fn leading(&self) -> Multilinear {
        self.map_values(|v| v.leading_vector())
    }

    pub fn madic_order(&self) -> Order {
        let a = self.nullary.values().map(|v| v.madic_order()).min().unwrap_or(Order::Infinite);
        let b = self.terms.values().map(|v| v.madic_order()).min().unwrap_or(Order::Infinite);
        a.min(b)
    }

    fn has_prefix(&self, prefix: &[Gen]) -> bool {
        use std::ops::Bound;
        match self.terms.range::<[Gen], _>((Bound::Included(prefix), Bound::Unbounded)).next() {
            Some((k, _)) => k.starts_with(prefix),
            None => false,
        }
    }

    /// Multilinear evaluation on arguments in path order. Arity 0 is not handled here.
    pub fn eval(&self, base: &BaseSpec, args: &[Morphism]) -> VectorB {
        let mut out = VectorB::zero();
        if args.is_empty() {
            return out;
        }
        let mut key = Vec::with_capacity(args.len());
        self.eval_rec(base, args, Coefficient::one(), &mut key, &mut out);
        out
    }

    fn eval_rec(&self, base: &BaseSpec, args: &[Morphism], coeff: Coefficient, key: &mut Vec<Gen>, out: &mut VectorB) {
        let pos = key.len();
        if pos == args.len() {
            if let Some(v) = self.terms.get(key.as_slice()) {
                out.add_scaled(base, &coeff, v);
            }
            return;
        }
        if pos > 0 && !self.has_prefix(key) {
            return;
        }
        let a = &args[pos];
        for (i, c) in a.value.iter() {
            let nc = base.mul(&coeff, c);
            if nc.is_zero() {
                continue;
            }
            key.push(Gen::new(a.src, a.tgt, i));
            self.eval_rec(base, args, nc, key, out);
            key.pop();
        }
    }

    /// Evaluation on `prefix, v, suffix` where only the middle argument is a general vector.
    pub fn eval_with_middle(
        &self,
        base: &BaseSpec,
        prefix: &[Gen],
        (src, tgt, mid): (usize, usize, &VectorB),
        suffix: &[Gen],
    ) -> VectorB {
        let mut out = VectorB::zero();
        let mut key = Vec::with_capacity(prefix.len() + 1 + suffix.len());
        key.extend_from_slice(prefix);
        if !prefix.is_empty() && !self.has_prefix(&key) {
            return out;
        }
        for (i, c) in mid.iter() {
            key.truncate(prefix.len());
            key.push(Gen::new(src, tgt, i));
            key.extend_from_slice(suffix);
            if let Some(v) = self.terms.get(&key) {
                out.add_scaled(base, c, v);
            }
        }
        out
    }

    /// Every term key must be composable, refer to existing basis elements, and values must live in
    /// the hom space from the first source to the last target.
    pub fn validate(&self, shape: &Shape) -> Result<(), String> {
        for (x, v) in &self.nullary {
            if *x >= shape.num_objects() {
                return Err(format!("nullary value at unknown object {x}"));
            }
            if let Some(i) = v.max_index() {
                if i >= shape.dim(*x, *x) {
                    return Err(format!("nullary value at {} out of range", shape.object_name(*x)));
                }
            }
        }
        for (k, v) in &self.terms {
            if k.is_empty() {
                return Err("empty key in term table".into());
            }
            for g in k {
                if g.src() >= shape.num_objects() || g.tgt() >= shape.num_objects() || g.idx() >= shape.dim(g.src(), g.tgt()) {
                    return Err(format!("unknown basis element {g:?}"));
                }
            }
            if shape.check_composable(k).is_err() {
                return Err(format!("non-composable key {}", shape.format_tuple(k)));
            }
            let (s, t) = (k[0].src(), k[k.len() - 1].tgt());
            if let Some(i) = v.max_index() {
                if i >= shape.dim(s, t) {
                    return Err(format!("value of {} out of range", shape.format_tuple(k)));
                }
            }
        }
        Ok(())
    }

    /// Degree of every term: `Σ|a_i| + shift(k) = |output|`.
    pub fn degree_violations(&self, shape: &Shape, shift: impl Fn(usize) -> i64) -> Vec<String> {
        let mode = shape.mode();
        let mut out = Vec::new();
        for (x, v) in &self.nullary {
            for (i, _) in v.iter() {
                if !mode.same(shape.hom(*x, *x).degree(i), shift(0)) {
                    out.push(format!("nullary at {} has component of wrong degree", shape.object_name(*x)));
                }
            }
        }
        for (k, v) in &self.terms {
            let din: i64 = k.iter().map(|&g| shape.degree(g)).sum();
            let (s, t) = (k[0].src(), k[k.len() - 1].tgt());
            for (i, _) in v.iter() {
                if !mode.same(shape.hom(s, t).degree(i), din + shift(k.len())) {
                    out.push(format!("{} -> {}", shape.format_tuple(k), shape.hom(s, t).name(i)));
                }
            }
        }
        out
    }
}
