//! Finite A∞-categories and their curved deformations as structure-constant tables.

mod multilinear;
mod shape;

use std::collections::BTreeMap;
use std::sync::{Arc, OnceLock};

use rayon::prelude::*;

use crate::base::BaseSpec;
use crate::error::{Error, Result};
use crate::graded::{parity, VectorB};
use crate::report::Report;

pub use multilinear::Multilinear;
pub use shape::{Gen, Morphism, Shape};

pub fn rational_base() -> &'static BaseSpec {
    static BASE: OnceLock<BaseSpec> = OnceLock::new();
    BASE.get_or_init(BaseSpec::rational)
}

/// Exponent of the sign attached to one term `μ(…, μ(block), …)` of the A∞-relation, as a sum of
/// switchable contributions. Only `right_reduced` is set in the convention used throughout.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct SignTable {
    /// Reduced degrees of the inputs to the right of the inner block.
    pub right_reduced: bool,
    /// Number of inputs to the right of the inner block.
    pub right_count: bool,
    /// Reduced degrees of the inputs inside the inner block.
    pub inner_reduced: bool,
    /// Reduced degrees of the inputs to the left of the inner block.
    pub left_reduced: bool,
    /// Arity of the inner operation.
    pub inner_arity: bool,
}

impl SignTable {
    pub const CANONICAL: SignTable = SignTable {
        right_reduced: true,
        right_count: false,
        inner_reduced: false,
        left_reduced: false,
        inner_arity: false,
    };

    pub const ENTRIES: [&'static str; 5] = ["right_reduced", "right_count", "inner_reduced", "left_reduced", "inner_arity"];

    pub fn flipped(&self, entry: usize) -> SignTable {
        let mut t = *self;
        match entry {
            0 => t.right_reduced = !t.right_reduced,
            1 => t.right_count = !t.right_count,
            2 => t.inner_reduced = !t.inner_reduced,
            3 => t.left_reduced = !t.left_reduced,
            4 => t.inner_arity = !t.inner_arity,
            _ => panic!("no sign table entry {entry}"),
        }
        t
    }

    /// Sign exponent for the inner block `[s, e)` of a path-ordered tuple.
    pub fn exponent(&self, shape: &Shape, tuple: &[Gen], s: usize, e: usize) -> bool {
        let red = |r: &[Gen]| -> i64 { r.iter().map(|&g| shape.reduced(g)).sum() };
        let mut n = 0i64;
        if self.right_reduced {
            n += red(&tuple[..s]);
        }
        if self.right_count {
            n += s as i64;
        }
        if self.inner_reduced {
            n += red(&tuple[s..e]);
        }
        if self.left_reduced {
            n += red(&tuple[e..]);
        }
        if self.inner_arity {
            n += (e - s) as i64;
        }
        parity(n)
    }
}

/// Common view of categories and deformations for generic evaluation.
pub trait Structure: Sync {
    fn shape(&self) -> &Shape;
    fn base(&self) -> &BaseSpec;
    fn table(&self) -> &Multilinear;
    fn k_max(&self) -> usize;
    /// True when all products above `k_max` vanish; false for models computed only up to `k_max`.
    fn complete(&self) -> bool;

    fn has_arity(&self, k: usize) -> bool {
        k <= self.k_max()
    }

    fn eval(&self, args: &[Morphism]) -> VectorB {
        if args.is_empty() || args.len() > self.k_max() {
            return VectorB::zero();
        }
        self.table().eval(self.base(), args)
    }

    fn nullary(&self, x: usize) -> VectorB {
        self.table().nullary_at(x).cloned().unwrap_or_default()
    }
}

/// Left-hand side of the (curved) A∞-relation on a basis tuple; `object` is used for empty tuples.
pub fn relation_defect<S: Structure + ?Sized>(p: &S, object: usize, tuple: &[Gen], signs: &SignTable) -> VectorB {
    let shape = p.shape();
    let base = p.base();
    let table = p.table();
    let k = tuple.len();
    let objs = Shape::path_objects(tuple, object);
    let terms: Vec<VectorB> = (0..=k)
        .flat_map(|s| (s..=k).map(move |e| (s, e)))
        .filter_map(|(s, e)| {
            let m = e - s;
            let outer = k - m + 1;
            if outer > p.k_max() || m > p.k_max() {
                return None;
            }
            let inner = if m == 0 { table.nullary_at(objs[s])? } else { table.value(&tuple[s..e])? };
            let v = table.eval_with_middle(base, &tuple[..s], (objs[s], objs[e], inner), &tuple[e..]);
            Some(if signs.exponent(shape, tuple, s, e) { v.neg() } else { v })
        })
        .collect();
    let mut out = VectorB::zero();
    for t in terms {
        out.add_assign(&t);
    }
    out
}

/// Signed terms of the relation, one per inner block, for inspection.
pub fn relation_terms<S: Structure + ?Sized>(p: &S, object: usize, tuple: &[Gen]) -> Vec<((usize, usize), bool, VectorB)> {
    let shape = p.shape();
    let table = p.table();
    let k = tuple.len();
    let objs = Shape::path_objects(tuple, object);
    let mut out = Vec::new();
    for s in 0..=k {
        for e in s..=k {
            let m = e - s;
            if k - m + 1 > p.k_max() || m > p.k_max() {
                continue;
            }
            let inner = if m == 0 { table.nullary_at(objs[s]) } else { table.value(&tuple[s..e]) };
            let Some(inner) = inner else { continue };
            let v = table.eval_with_middle(p.base(), &tuple[..s], (objs[s], objs[e], inner), &tuple[e..]);
            out.push(((s, e), SignTable::CANONICAL.exponent(shape, tuple, s, e), v));
        }
    }
    out
}

fn check_inputs<S: Structure + ?Sized>(p: &S, inputs: &[Morphism]) -> Result<()> {
    for w in inputs.windows(2) {
        if w[0].tgt != w[1].src {
            return Err(Error::NotComposable(format!(
                "target {} does not match source {}",
                p.shape().object_name(w[0].tgt),
                p.shape().object_name(w[1].src)
            )));
        }
    }
    if inputs.len() > p.k_max() {
        return Err(Error::ArityExceeded { arity: inputs.len(), bound: p.k_max() });
    }
    Ok(())
}

/// Relation checks over all composable tuples, run in parallel; results kept in tuple order.
fn relation_sweep<S: Structure + ?Sized>(p: &S, curved: bool, max_inputs: usize, report: &mut Report) -> usize {
    let shape = p.shape();
    let extra = usize::from(curved);
    let mut reached = 0;
    let start = if curved { 0 } else { 1 };
    for len in start..=max_inputs {
        if !p.complete() && len + extra > p.k_max() {
            report.note(format!(
                "products are known up to arity {}, so relations with {} inputs were not checked",
                p.k_max(),
                len
            ));
            break;
        }
        let cases: Vec<(usize, Vec<Gen>)> = if len == 0 {
            (0..shape.num_objects()).map(|x| (x, Vec::new())).collect()
        } else {
            shape.tuples(len).into_iter().map(|t| (t[0].src(), t)).collect()
        };
        let found: Vec<(String, String)> = cases
            .par_iter()
            .filter_map(|(x, t)| {
                let d = relation_defect(p, *x, t, &SignTable::CANONICAL);
                if d.is_zero() {
                    return None;
                }
                let objs = Shape::path_objects(t, *x);
                let loc = if t.is_empty() {
                    format!("empty tuple at {}", shape.object_name(*x))
                } else {
                    shape.format_tuple(t)
                };
                Some((loc, shape.format_vector(objs[0], objs[objs.len() - 1], &d)))
            })
            .collect();
        report.checked += cases.len();
        for (loc, val) in found {
            report.violate("relation", loc, val);
        }
        reached = len;
    }
    reached
}

/// Strict unitality: μ¹(id) = 0, μ²(a, id) = a, μ²(id, a) = (−1)^{|a|} a, μ^{≥3}(…, id, …) = 0.
pub fn unitality_violations<S: Structure + ?Sized>(p: &S, max_inputs: usize) -> Vec<(String, String)> {
    let shape = p.shape();
    let mut out = Vec::new();
    for x in 0..shape.num_objects() {
        let Some(id) = shape.identity_gen(x) else { continue };
        if p.has_arity(1) {
            if let Some(v) = p.table().value(&[id]) {
                out.push((format!("mu1({})", shape.gen_name(id)), shape.format_vector(x, x, v)));
            }
        }
    }
    if p.has_arity(2) {
        for a in shape.all_gens() {
            if let Some(id) = shape.identity_gen(a.src()) {
                let v = p.table().value(&[id, a]).cloned().unwrap_or_default();
                if v != VectorB::unit(a.idx()) {
                    out.push((format!("mu2({}, id)", shape.gen_name(a)), shape.format_vector(a.src(), a.tgt(), &v)));
                }
            }
            if let Some(id) = shape.identity_gen(a.tgt()) {
                let v = p.table().value(&[a, id]).cloned().unwrap_or_default();
                let expected = if parity(shape.degree(a)) { VectorB::unit(a.idx()).neg() } else { VectorB::unit(a.idx()) };
                if v != expected {
                    out.push((format!("mu2(id, {})", shape.gen_name(a)), shape.format_vector(a.src(), a.tgt(), &v)));
                }
            }
        }
    }
    for (key, v) in &p.table().terms {
        if key.len() >= 3 && key.len() <= max_inputs.max(p.k_max()) && key.iter().any(|&g| shape.is_identity(g)) {
            out.push((format!("mu{}{}", key.len(), shape.format_tuple(key)), shape.format_vector(key[0].src(), key[key.len() - 1].tgt(), v)));
        }
    }
    out
}

/// A bare product family on a shape over a base: no reference category, no gates.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Products {
    pub shape: Arc<Shape>,
    pub base: BaseSpec,
    pub table: Multilinear,
    pub k_max: usize,
    pub complete: bool,
}

impl Products {
    pub fn new(shape: impl Into<Arc<Shape>>, base: BaseSpec, table: Multilinear, k_max: usize, complete: bool) -> Self {
        Products { shape: shape.into(), base, table, k_max, complete }
    }

    pub fn of<S: Structure + ?Sized>(p: &S) -> Self {
        Products {
            shape: Arc::new(p.shape().clone()),
            base: p.base().clone(),
            table: p.table().clone(),
            k_max: p.k_max(),
            complete: p.complete(),
        }
    }

    pub fn is_curvature_free(&self) -> bool {
        self.table.nullary.is_empty()
    }

    pub fn defect(&self, object: usize, tuple: &[Gen]) -> VectorB {
        relation_defect(self, object, tuple, &SignTable::CANONICAL)
    }

    /// Curved relations, with curvature insertions, on all tuples up to `max_inputs`.
    pub fn check_relations(&self, max_inputs: usize) -> Report {
        let mut report = Report::new("curved A-infinity relations")
            .with("objects", self.shape.num_objects())
            .with("k_max", self.k_max)
            .with("products complete above k_max", self.complete)
            .with("relation bound", max_inputs)
            .with("truncation", self.base.truncation());
        for d in self.table.degree_violations(&self.shape, |k| 2 - k as i64) {
            report.violate("degree", d, "product does not have degree 2 - k");
        }
        let reached = relation_sweep(self, !self.is_curvature_free(), max_inputs, &mut report);
        report.set("verified up to inputs", reached);
        report
    }
}

impl Structure for Products {
    fn shape(&self) -> &Shape {
        &self.shape
    }
    fn base(&self) -> &BaseSpec {
        &self.base
    }
    fn table(&self) -> &Multilinear {
        &self.table
    }
    fn k_max(&self) -> usize {
        self.k_max
    }
    fn complete(&self) -> bool {
        self.complete
    }
}

/// A finite A∞-category over `Q`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct AInfCategory {
    shape: Arc<Shape>,
    products: Multilinear,
    k_max: usize,
    complete: bool,
}

impl AInfCategory {
    /// Products must have rational coefficients and arity between 1 and `k_max`.
    pub fn new(shape: impl Into<Arc<Shape>>, products: Multilinear, k_max: usize) -> Result<Self> {
        Self::build(shape.into(), products, k_max, true)
    }

    /// A category whose products are only known up to arity `k_max`.
    pub fn truncated(shape: impl Into<Arc<Shape>>, products: Multilinear, k_max: usize) -> Result<Self> {
        Self::build(shape.into(), products, k_max, false)
    }

    fn build(shape: Arc<Shape>, products: Multilinear, k_max: usize, complete: bool) -> Result<Self> {
        products.validate(&shape).map_err(Error::Invalid)?;
        if !products.nullary.is_empty() {
            return Err(Error::Invalid("an undeformed category has no curvature".into()));
        }
        if products.max_arity() > k_max {
            return Err(Error::ArityExceeded { arity: products.max_arity(), bound: k_max });
        }
        for v in products.terms.values() {
            if v.iter().any(|(_, c)| c.as_constant().is_none()) {
                return Err(Error::Invalid("category products must have rational coefficients".into()));
            }
        }
        Ok(AInfCategory { shape, products, k_max, complete })
    }

    pub fn shape_arc(&self) -> &Arc<Shape> {
        &self.shape
    }

    pub fn products(&self) -> &Multilinear {
        &self.products
    }

    pub fn is_complete(&self) -> bool {
        self.complete
    }

    pub fn evaluate_product(&self, inputs: &[Morphism]) -> Result<VectorB> {
        if inputs.is_empty() {
            return Err(Error::Invalid("a category has no nullary product".into()));
        }
        check_inputs(self, inputs)?;
        Ok(self.eval(inputs))
    }

    pub fn ainf_defect(&self, tuple: &[Gen]) -> Result<VectorB> {
        if tuple.is_empty() {
            return Err(Error::Invalid("relations of a category need at least one input".into()));
        }
        self.shape.check_composable(tuple)?;
        Ok(relation_defect(self, tuple[0].src(), tuple, &SignTable::CANONICAL))
    }

    pub fn ainf_defect_with(&self, tuple: &[Gen], signs: &SignTable) -> VectorB {
        relation_defect(self, tuple[0].src(), tuple, signs)
    }

    pub fn check_relations(&self, max_inputs: usize) -> Report {
        let mut report = Report::new("A-infinity relations")
            .with("objects", self.shape.num_objects())
            .with("k_max", self.k_max)
            .with("products complete above k_max", self.complete)
            .with("relation bound", max_inputs);
        for d in self.products.degree_violations(&self.shape, |k| 2 - k as i64) {
            report.violate("degree", d, "product does not have degree 2 - k");
        }
        let reached = relation_sweep(self, false, max_inputs, &mut report);
        report.set("verified up to inputs", reached);
        for (loc, val) in unitality_violations(self, max_inputs) {
            report.violate("unitality", loc, val);
        }
        report
    }

    pub fn with_products(&self, products: Multilinear) -> Result<Self> {
        AInfCategory::new(self.shape.clone(), products, self.k_max.max(1))
    }
}

impl Structure for AInfCategory {
    fn shape(&self) -> &Shape {
        &self.shape
    }
    fn base(&self) -> &BaseSpec {
        rational_base()
    }
    fn table(&self) -> &Multilinear {
        &self.products
    }
    fn k_max(&self) -> usize {
        self.k_max
    }
    fn complete(&self) -> bool {
        self.complete
    }
}

/// A curved deformation of a finite A∞-category over a truncated base.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct AInfDeformation {
    base: BaseSpec,
    reference: Arc<AInfCategory>,
    products: Multilinear,
    k_max: usize,
    complete: bool,
}

impl AInfDeformation {
    /// `products.nullary` holds the curvature. Coefficients must be normal and curvature infinitesimal.
    pub fn new(base: BaseSpec, reference: impl Into<Arc<AInfCategory>>, products: Multilinear, k_max: usize) -> Result<Self> {
        Self::build(base, reference.into(), products, k_max, true)
    }

    pub fn truncated(base: BaseSpec, reference: impl Into<Arc<AInfCategory>>, products: Multilinear, k_max: usize) -> Result<Self> {
        Self::build(base, reference.into(), products, k_max, false)
    }

    fn build(base: BaseSpec, reference: Arc<AInfCategory>, products: Multilinear, k_max: usize, complete: bool) -> Result<Self> {
        let shape = reference.shape();
        products.validate(shape).map_err(Error::Invalid)?;
        if products.max_arity() > k_max {
            return Err(Error::ArityExceeded { arity: products.max_arity(), bound: k_max });
        }
        for v in products.nullary.values().chain(products.terms.values()) {
            for (_, c) in v.iter() {
                base.check(c)?;
            }
        }
        for (x, v) in &products.nullary {
            if !v.madic_order().at_least(1) {
                return Err(Error::NotInfinitesimal(format!("curvature at {}", shape.object_name(*x))));
            }
        }
        Ok(AInfDeformation { base, reference, products, k_max, complete })
    }

    /// The undeformed deformation `μ_q = μ`, no curvature.
    pub fn trivial(base: BaseSpec, reference: impl Into<Arc<AInfCategory>>) -> Self {
        let reference = reference.into();
        let products = reference.products().clone();
        let k_max = reference.k_max();
        let complete = reference.is_complete();
        AInfDeformation { base, reference, products, k_max, complete }
    }

    pub fn reference(&self) -> &Arc<AInfCategory> {
        &self.reference
    }

    pub fn products(&self) -> &Multilinear {
        &self.products
    }

    pub fn is_complete(&self) -> bool {
        self.complete
    }

    pub fn curvature(&self, x: usize) -> VectorB {
        self.nullary(x)
    }

    pub fn is_curvature_free(&self) -> bool {
        self.products.nullary.is_empty()
    }

    pub fn evaluate_product(&self, inputs: &[Morphism]) -> Result<VectorB> {
        check_inputs(self, inputs)?;
        Ok(self.eval(inputs))
    }

    pub fn curved_defect(&self, object: usize, tuple: &[Gen]) -> Result<VectorB> {
        self.shape().check_composable(tuple)?;
        if let Some(g) = tuple.first() {
            if g.src() != object {
                return Err(Error::NotComposable("tuple does not start at the given object".into()));
            }
        }
        Ok(relation_defect(self, object, tuple, &SignTable::CANONICAL))
    }

    /// Reduction modulo the maximal ideal.
    pub fn leading_products(&self) -> Multilinear {
        let mut l = self.products.leading();
        l.nullary.clear();
        l
    }

    pub fn leading_term_violations(&self) -> Vec<(String, String)> {
        let shape = self.shape();
        let lead = self.leading_products();
        let reference = self.reference.products();
        let bound = if self.complete && self.reference.is_complete() {
            usize::MAX
        } else {
            self.k_max.min(self.reference.k_max())
        };
        let keys: std::collections::BTreeSet<&Vec<Gen>> = lead.terms.keys().chain(reference.terms.keys()).collect();
        let mut out = Vec::new();
        for k in keys.into_iter().filter(|k| k.len() <= bound) {
            let a = lead.value(k).cloned().unwrap_or_default();
            let b = reference.value(k).cloned().unwrap_or_default();
            if a != b {
                let (s, t) = (k[0].src(), k[k.len() - 1].tgt());
                out.push((
                    format!("mu{}{}", k.len(), shape.format_tuple(k)),
                    format!("reduces to {} instead of {}", shape.format_vector(s, t, &a), shape.format_vector(s, t, &b)),
                ));
            }
        }
        out
    }

    pub fn check_relations(&self, max_inputs: usize) -> Report {
        let mut report = Report::new("curved A-infinity relations")
            .with("objects", self.shape().num_objects())
            .with("k_max", self.k_max)
            .with("products complete above k_max", self.complete)
            .with("relation bound", max_inputs)
            .with("truncation", self.base.truncation());
        for (x, v) in &self.products.nullary {
            if !v.madic_order().at_least(1) {
                report.violate("curvature order", self.shape().object_name(*x), "curvature is not infinitesimal");
            }
        }
        for (loc, val) in self.leading_term_violations() {
            report.violate("leading term", loc, val);
        }
        if !report.is_ok() {
            report.note("rejected before relation checking");
            return report;
        }
        for d in self.products.degree_violations(self.shape(), |k| 2 - k as i64) {
            report.violate("degree", d, "product does not have degree 2 - k");
        }
        let reached = relation_sweep(self, !self.is_curvature_free(), max_inputs, &mut report);
        report.set("verified up to inputs", reached);
        let units = unitality_violations(self, max_inputs);
        if units.is_empty() {
            report.note("strictly unital");
        } else {
            report.note(format!("not strictly unital ({} unit identities fail); informational", units.len()));
        }
        report
    }

    pub fn with_products(&self, products: Multilinear, k_max: usize, complete: bool) -> Result<Self> {
        Self::build(self.base.clone(), self.reference.clone(), products, k_max, complete)
    }

    /// Same data over a different reference category with identical shape, unchecked.
    pub fn from_parts(base: BaseSpec, reference: Arc<AInfCategory>, products: Multilinear, k_max: usize, complete: bool) -> Self {
        AInfDeformation { base, reference, products, k_max, complete }
    }
}

impl Structure for AInfDeformation {
    fn shape(&self) -> &Shape {
        self.reference.shape()
    }
    fn base(&self) -> &BaseSpec {
        &self.base
    }
    fn table(&self) -> &Multilinear {
        &self.products
    }
    fn k_max(&self) -> usize {
        self.k_max
    }
    fn complete(&self) -> bool {
        self.complete
    }
}

/// Builds the A∞-category of a dg category. `compose` lists `(a, b, a∘b)` with `b` applied first;
/// compositions with identities are filled in automatically.
pub fn dg_category(shape: Shape, compose: &[(Gen, Gen, VectorB)], differential: &[(Gen, VectorB)]) -> Result<AInfCategory> {
    let mut products = Multilinear::new();
    let mut table: BTreeMap<(Gen, Gen), VectorB> = BTreeMap::new();
    for (a, b, v) in compose {
        if b.tgt != a.src {
            return Err(Error::NotComposable(format!("{} after {}", shape.gen_name(*a), shape.gen_name(*b))));
        }
        table.insert((*a, *b), v.clone());
    }
    for a in shape.all_gens() {
        if let Some(id) = shape.identity_gen(a.src()) {
            table.entry((a, id)).or_insert_with(|| VectorB::unit(a.idx()));
        }
        if let Some(id) = shape.identity_gen(a.tgt()) {
            table.entry((id, a)).or_insert_with(|| VectorB::unit(a.idx()));
        }
    }
    for ((a, b), v) in table {
        let v = if parity(shape.degree(b)) { v.neg() } else { v };
        products.add_term(vec![b, a], &v);
    }
    for (x, dx) in differential {
        let v = if parity(shape.degree(*x)) { dx.neg() } else { dx.clone() };
        products.add_term(vec![*x], &v);
    }
    AInfCategory::new(shape, products, 2)
}
