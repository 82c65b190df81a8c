//! A∞-functors and curved functors between product families.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;

use crate::ainf::{rational_base, Gen, Morphism, Multilinear, Products, Shape, SignTable, Structure};
use crate::error::{Error, Result};
use crate::graded::VectorB;
use crate::linalg::QMatrix;
use crate::report::Report;
use crate::splitting::mu1_matrix;

/// Components `F⁰` (the nullary part, per source object) and `F^k` on source basis tuples.
#[derive(Clone, Debug)]
pub struct DeformedFunctor {
    source: Arc<Products>,
    target: Arc<Products>,
    object_map: Vec<usize>,
    components: Multilinear,
    k_max: usize,
    complete: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum FunctorClass {
    GaugeEquivalence,
    Isomorphism,
    QuasiIsomorphism,
    NoneOfThese,
}

impl fmt::Display for FunctorClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FunctorClass::GaugeEquivalence => "gauge-equivalence",
            FunctorClass::Isomorphism => "isomorphism",
            FunctorClass::QuasiIsomorphism => "quasi-isomorphism",
            FunctorClass::NoneOfThese => "none-of-these",
        })
    }
}

impl DeformedFunctor {
    pub fn new(
        source: Arc<Products>,
        target: Arc<Products>,
        object_map: Vec<usize>,
        components: Multilinear,
        k_max: usize,
        complete: bool,
    ) -> Result<Self> {
        let (ss, ts) = (&source.shape, &target.shape);
        if object_map.len() != ss.num_objects() || object_map.iter().any(|&y| y >= ts.num_objects()) {
            return Err(Error::Invalid("object map does not match the categories".into()));
        }
        for (x, v) in &components.nullary {
            if *x >= ss.num_objects() {
                return Err(Error::Invalid(format!("curvature component at unknown object {x}")));
            }
            if !v.madic_order().at_least(1) {
                return Err(Error::NotInfinitesimal(format!("F0 at {}", ss.object_name(*x))));
            }
            let y = object_map[*x];
            if v.max_index().is_some_and(|i| i >= ts.dim(y, y)) {
                return Err(Error::Invalid(format!("F0 at {} out of range", ss.object_name(*x))));
            }
        }
        for (k, v) in &components.terms {
            if k.is_empty() || ss.check_composable(k).is_err() {
                return Err(Error::NotComposable(format!("functor component key {}", ss.format_tuple(k))));
            }
            if k.len() > k_max {
                return Err(Error::ArityExceeded { arity: k.len(), bound: k_max });
            }
            let (s, t) = (object_map[k[0].src()], object_map[k[k.len() - 1].tgt()]);
            if v.max_index().is_some_and(|i| i >= ts.dim(s, t)) {
                return Err(Error::Invalid(format!("value of {} out of range", ss.format_tuple(k))));
            }
        }
        Ok(DeformedFunctor { source, target, object_map, components, k_max, complete })
    }

    pub fn identity(p: Arc<Products>) -> Self {
        let mut components = Multilinear::new();
        for g in p.shape.all_gens() {
            components.add_term(vec![g], &VectorB::unit(g.idx()));
        }
        let objects = (0..p.shape.num_objects()).collect();
        DeformedFunctor { source: p.clone(), target: p, object_map: objects, components, k_max: 1, complete: true }
    }

    /// The functor `F⁰ = r`, `F¹ = Id` from the uncurving of `target` by `r` to `target`.
    pub fn gauge(source: Arc<Products>, target: Arc<Products>, r: &BTreeMap<usize, VectorB>) -> Result<Self> {
        let mut components = DeformedFunctor::identity(target.clone()).components;
        for (x, v) in r {
            components.add_nullary(*x, v);
        }
        let objects = (0..target.shape.num_objects()).collect();
        DeformedFunctor::new(source, target, objects, components, 1, true)
    }

    pub fn source(&self) -> &Arc<Products> {
        &self.source
    }

    pub fn target(&self) -> &Arc<Products> {
        &self.target
    }

    pub fn object_map(&self) -> &[usize] {
        &self.object_map
    }

    pub fn components(&self) -> &Multilinear {
        &self.components
    }

    pub fn k_max(&self) -> usize {
        self.k_max
    }

    pub fn is_complete(&self) -> bool {
        self.complete
    }

    pub fn curvature(&self, x: usize) -> VectorB {
        self.components.nullary_at(x).cloned().unwrap_or_default()
    }

    /// `F` on source morphisms in path order; the empty list gives `F⁰` at `object`.
    pub fn apply(&self, object: usize, args: &[Morphism]) -> VectorB {
        if args.is_empty() {
            return self.curvature(object);
        }
        if args.len() > self.k_max {
            return VectorB::zero();
        }
        self.components.eval(&self.target.base, args)
    }

    /// `Σ outer(F(g_1), …, F(g_l))` over all ways to cut `args` into consecutive groups, empty
    /// groups standing for `F⁰`.
    fn sum_over_groupings(
        &self,
        object: usize,
        args: &[Morphism],
        max_groups: usize,
        outer: &(dyn Fn(usize, &[Morphism]) -> VectorB + Sync),
    ) -> VectorB {
        let objs: Vec<usize> = std::iter::once(object).chain(args.iter().map(|a| a.tgt)).collect();
        let mut out = VectorB::zero();
        let mut cur = Vec::new();
        self.groupings_rec(&objs, args, 0, max_groups, &mut cur, outer, &mut out);
        out
    }

    #[allow(clippy::too_many_arguments)]
    fn groupings_rec(
        &self,
        objs: &[usize],
        args: &[Morphism],
        pos: usize,
        max_groups: usize,
        cur: &mut Vec<Morphism>,
        outer: &(dyn Fn(usize, &[Morphism]) -> VectorB + Sync),
        out: &mut VectorB,
    ) {
        if pos == args.len() {
            out.add_assign(&outer(self.object_map[objs[0]], cur));
        }
        if cur.len() >= max_groups {
            return;
        }
        let x = objs[pos];
        let f0 = self.curvature(x);
        if !f0.is_zero() && (cur.len() as u32) < self.target.base.truncation() + args.len() as u32 {
            cur.push(Morphism::new(self.object_map[x], self.object_map[x], f0));
            self.groupings_rec(objs, args, pos, max_groups, cur, outer, out);
            cur.pop();
        }
        for end in pos + 1..=args.len().min(pos + self.k_max) {
            let v = self.components.eval(&self.target.base, &args[pos..end]);
            if v.is_zero() {
                continue;
            }
            cur.push(Morphism::new(self.object_map[objs[pos]], self.object_map[objs[end]], v));
            self.groupings_rec(objs, args, end, max_groups, cur, outer, out);
            cur.pop();
        }
    }

    /// Left side minus right side of the curved functor relation on a source basis tuple.
    pub fn functor_defect(&self, object: usize, tuple: &[Gen]) -> Result<VectorB> {
        let ss = &self.source.shape;
        ss.check_composable(tuple)?;
        if tuple.first().is_some_and(|g| g.src() != object) {
            return Err(Error::NotComposable("tuple does not start at the given object".into()));
        }
        let k = tuple.len();
        let objs = Shape::path_objects(tuple, object);
        let base = &self.target.base;
        let mut lhs = VectorB::zero();
        for s in 0..=k {
            for e in s..=k {
                let m = e - s;
                if k - m + 1 > self.k_max || m > self.source.k_max {
                    continue;
                }
                let inner = if m == 0 { self.source.table.nullary_at(objs[s]) } else { self.source.table.value(&tuple[s..e]) };
                let Some(inner) = inner else { continue };
                let v = self.components.eval_with_middle(base, &tuple[..s], (objs[s], objs[e], inner), &tuple[e..]);
                if SignTable::CANONICAL.exponent(ss, tuple, s, e) {
                    lhs.sub_assign(&v);
                } else {
                    lhs.add_assign(&v);
                }
            }
        }
        let args: Vec<Morphism> = tuple.iter().map(|&g| Morphism::basis(g)).collect();
        let target = &self.target;
        let outer = |y: usize, xs: &[Morphism]| -> VectorB { if xs.is_empty() { target.nullary(y) } else { target.eval(xs) } };
        let max_groups = if target.complete { target.table.max_arity().max(1) } else { target.k_max };
        let rhs = self.sum_over_groupings(object, &args, max_groups, &outer);
        Ok(lhs.sub(&rhs))
    }

    /// Largest tuple length on which every term of the functor relation is known.
    pub fn checkable_length(&self, max_inputs: usize) -> usize {
        let curved = usize::from(!self.source.is_curvature_free());
        let mut n = max_inputs;
        if !self.complete {
            n = n.min(self.k_max.saturating_sub(curved));
        }
        if !self.source.complete {
            n = n.min(self.source.k_max);
        }
        if !self.target.complete {
            let has_f0 = !self.components.nullary.is_empty();
            n = if has_f0 { 0 } else { n.min(self.target.k_max) };
        }
        n
    }

    pub fn check(&self, max_inputs: usize) -> Report {
        let ss = &self.source.shape;
        let mut report = Report::new("curved functor relations")
            .with("source objects", ss.num_objects())
            .with("k_max", self.k_max)
            .with("components complete above k_max", self.complete)
            .with("relation bound", max_inputs);
        for d in self.degree_violations() {
            report.violate("degree", d, "component does not have degree 1 - k");
        }
        let reach = self.checkable_length(max_inputs);
        if reach < max_inputs {
            report.note(format!("components are known only far enough to check {reach} inputs"));
        }
        for len in 0..=reach {
            let cases: Vec<(usize, Vec<Gen>)> = if len == 0 {
                (0..ss.num_objects()).map(|x| (x, Vec::new())).collect()
            } else {
                ss.tuples(len).into_iter().map(|t| (t[0].src(), t)).collect()
            };
            let found: Vec<(String, String)> = cases
                .par_iter()
                .filter_map(|(x, t)| {
                    let d = self.functor_defect(*x, t).expect("composable by construction");
                    if d.is_zero() {
                        return None;
                    }
                    let loc = if t.is_empty() { format!("empty tuple at {}", ss.object_name(*x)) } else { ss.format_tuple(t) };
                    let objs = Shape::path_objects(t, *x);
                    let (s, e) = (self.object_map[objs[0]], self.object_map[objs[objs.len() - 1]]);
                    Some((loc, self.target.shape.format_vector(s, e, &d)))
                })
                .collect();
            report.checked += cases.len();
            for (loc, val) in found {
                report.violate("functor relation", loc, val);
            }
        }
        report.set("verified up to inputs", reach);
        report
    }

    fn degree_violations(&self) -> Vec<String> {
        let (ss, ts) = (&self.source.shape, &self.target.shape);
        let mode = ts.mode();
        let mut out = Vec::new();
        for (x, v) in &self.components.nullary {
            let y = self.object_map[*x];
            if v.support().any(|i| !mode.same(ts.hom(y, y).degree(i), 1)) {
                out.push(format!("F0 at {}", ss.object_name(*x)));
            }
        }
        for (k, v) in &self.components.terms {
            let din: i64 = k.iter().map(|&g| ss.degree(g)).sum();
            let (s, t) = (self.object_map[k[0].src()], self.object_map[k[k.len() - 1].tgt()]);
            if v.support().any(|i| !mode.same(ts.hom(s, t).degree(i), din + 1 - k.len() as i64)) {
                out.push(format!("F{}{}", k.len(), ss.format_tuple(k)));
            }
        }
        out
    }

    /// `G ∘ F` with `F`'s curvature inserted as nullary inputs of `G`; components up to `bound`.
    pub fn compose(g: &DeformedFunctor, f: &DeformedFunctor, bound: usize) -> Result<DeformedFunctor> {
        if g.source.shape != f.target.shape {
            return Err(Error::NotComposable("target of the first functor is not the source of the second".into()));
        }
        let ss = f.source.shape.clone();
        let outer = |y: usize, xs: &[Morphism]| -> VectorB { g.apply(y, xs) };
        let max_groups = if g.complete { g.components.max_arity().max(1) } else { g.k_max };
        let mut components = Multilinear::new();
        for x in 0..ss.num_objects() {
            let v = f.sum_over_groupings(x, &[], max_groups, &outer);
            components.add_nullary(x, &v);
        }
        for len in 1..=bound {
            let tuples = ss.tuples(len);
            let values: Vec<(Vec<Gen>, VectorB)> = tuples
                .into_par_iter()
                .map(|t| {
                    let args: Vec<Morphism> = t.iter().map(|&a| Morphism::basis(a)).collect();
                    let v = f.sum_over_groupings(t[0].src(), &args, max_groups, &outer);
                    (t, v)
                })
                .collect();
            for (t, v) in values {
                components.add_term(t, &v);
            }
        }
        let arity_cap = f.components.max_arity().max(1) * g.components.max_arity().max(1);
        let complete = f.complete && g.complete && f.components.nullary.is_empty() && bound >= arity_cap;
        let object_map = f.object_map.iter().map(|&y| g.object_map[y]).collect();
        DeformedFunctor::new(f.source.clone(), g.target.clone(), object_map, components, bound, complete)
    }

    /// Reduction modulo the maximal ideal, over the rational base.
    pub fn leading_term(&self) -> DeformedFunctor {
        let lead = |p: &Products| {
            let mut t = p.table.leading();
            t.nullary.clear();
            Arc::new(Products::new(p.shape.clone(), rational_base().clone(), t, p.k_max, p.complete))
        };
        let mut components = self.components.leading();
        components.nullary.clear();
        DeformedFunctor {
            source: lead(&self.source),
            target: lead(&self.target),
            object_map: self.object_map.clone(),
            components,
            k_max: self.k_max,
            complete: self.complete,
        }
    }

    /// Matrix of the leading term of `F¹` on `Hom(x, y)`.
    pub fn f1_matrix(&self, x: usize, y: usize) -> QMatrix {
        let (ss, ts) = (&self.source.shape, &self.target.shape);
        let (fx, fy) = (self.object_map[x], self.object_map[y]);
        let mut m = QMatrix::zeros(ts.dim(fx, fy), ss.dim(x, y));
        for g in ss.gens(x, y) {
            if let Some(v) = self.components.value(&[g]) {
                for (i, c) in v.iter() {
                    m.set(i, g.idx(), c.constant_term());
                }
            }
        }
        m
    }

    /// Classification of the leading term; the strongest applicable class is returned.
    pub fn classify(&self) -> FunctorClass {
        let lead = self.leading_term();
        let (ss, ts) = (&lead.source.shape, &lead.target.shape);
        let pairs: Vec<(usize, usize)> = (0..ss.num_objects()).flat_map(|x| (0..ss.num_objects()).map(move |y| (x, y))).collect();
        let identity_objects = ss == ts && lead.object_map.iter().enumerate().all(|(i, &y)| i == y);
        if identity_objects {
            let f1_identity = pairs.iter().all(|&(x, y)| lead.f1_matrix(x, y) == QMatrix::identity(ss.dim(x, y)));
            let higher_zero = lead.components.terms.keys().all(|k| k.len() == 1);
            if f1_identity && higher_zero {
                return FunctorClass::GaugeEquivalence;
            }
        }
        let mut seen = vec![false; ts.num_objects()];
        for &y in &lead.object_map {
            seen[y] = true;
        }
        let bijective = ss.num_objects() == ts.num_objects() && seen.iter().all(|&b| b);
        if bijective
            && pairs.iter().all(|&(x, y)| {
                let m = lead.f1_matrix(x, y);
                m.rows() == m.cols() && m.rank() == m.cols()
            })
        {
            return FunctorClass::Isomorphism;
        }
        if pairs.iter().all(|&(x, y)| lead.induces_cohomology_iso(x, y)) {
            return FunctorClass::QuasiIsomorphism;
        }
        FunctorClass::NoneOfThese
    }

    fn induces_cohomology_iso(&self, x: usize, y: usize) -> bool {
        let (fx, fy) = (self.object_map[x], self.object_map[y]);
        let ds = mu1_matrix(self.source.as_ref(), x, y);
        let dt = mu1_matrix(self.target.as_ref(), fx, fy);
        let f = self.f1_matrix(x, y);
        let zs = ds.kernel();
        let hs = zs.len() - ds.rank();
        let ht = dt.kernel().len() - dt.rank();
        if hs != ht {
            return false;
        }
        let n = dt.rows();
        let mut cols: Vec<Vec<_>> = (0..dt.cols()).map(|j| dt.column(j)).collect();
        let bt = QMatrix::from_columns(n, &cols).rank();
        cols.extend(zs.iter().map(|z| f.mul_vec(z)));
        QMatrix::from_columns(n, &cols).rank() - bt == hs
    }

    /// `F⁰ + F¹(S) + F²(S, S) + …` at the object `x`.
    pub fn transport_uncurving(&self, x: usize, s: &VectorB) -> VectorB {
        let mut out = self.curvature(x);
        let trunc = self.target.base.truncation() as usize;
        let sm = Morphism::new(x, x, s.clone());
        let mut args = Vec::new();
        for _ in 0..self.k_max.min(trunc) {
            args.push(sm.clone());
            let v = self.apply(x, &args);
            out.add_assign(&v);
        }
        out
    }
}
