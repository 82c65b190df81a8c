//! Additive and twisted completions, twisted-complex curvature, uncurving and the uncurvability
//! solver.

use std::collections::BTreeMap;
use std::sync::Arc;

use rayon::prelude::*;

use crate::ainf::{AInfCategory, AInfDeformation, Gen, Morphism, Multilinear, Products, Shape, Structure};
use crate::base::Coefficient;
use crate::error::{Error, Result};
use crate::functor::DeformedFunctor;
use crate::graded::{parity, GradedBasis, VectorB};
use crate::report::Report;
use crate::splitting::HomologicalSplitting;

/// Morphism between formal sums, keyed by `(source summand, target summand)`.
pub type TwMatrix = BTreeMap<(usize, usize), VectorB>;

/// A formal sum of shifted objects with a twisted differential `δ = δ₀ + δ′`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct TwistedComplex {
    pub name: String,
    pub summands: Vec<(usize, i64)>,
    pub delta: TwMatrix,
}

/// Sign rule for products in the additive completion.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum AddSignRule {
    /// `Σ_{j<i} ‖a_i‖ l_j`.
    Standard,
    /// `Σ_{j<i} ‖a_j‖ l_i`, kept for comparison.
    Transposed,
}

impl TwistedComplex {
    pub fn new(name: impl Into<String>, summands: Vec<(usize, i64)>, delta: TwMatrix) -> Self {
        TwistedComplex { name: name.into(), summands, delta }
    }

    /// The object itself: one summand, no shift, `δ = 0`.
    pub fn object(shape: &Shape, x: usize) -> Self {
        TwistedComplex::new(shape.object_name(x), vec![(x, 0)], TwMatrix::new())
    }

    pub fn len(&self) -> usize {
        self.summands.len()
    }

    pub fn is_empty(&self) -> bool {
        self.summands.is_empty()
    }

    /// Degree of a generator placed from summand `i` of `self` to summand `j` of `other`.
    pub fn entry_degree(&self, other: &TwistedComplex, shape: &Shape, i: usize, j: usize, g: Gen) -> i64 {
        shape.degree(g) + other.summands[j].1 - self.summands[i].1
    }

    /// Leading part of `δ`.
    pub fn delta0(&self) -> TwMatrix {
        self.delta.iter().map(|(k, v)| (*k, v.leading_vector())).filter(|(_, v)| !v.is_zero()).collect()
    }

    pub fn validate<S: Structure + ?Sized>(&self, c: &S) -> Result<()> {
        let shape = c.shape();
        let n = shape.num_objects();
        if self.summands.iter().any(|&(x, _)| x >= n) {
            return Err(Error::Invalid(format!("{}: unknown object in summands", self.name)));
        }
        for (&(i, j), v) in &self.delta {
            if i >= self.len() || j >= self.len() {
                return Err(Error::Invalid(format!("{}: delta entry outside the summands", self.name)));
            }
            let (a, b) = (self.summands[i].0, self.summands[j].0);
            for (k, coeff) in v.iter() {
                if k >= shape.dim(a, b) {
                    return Err(Error::Invalid(format!("{}: delta entry out of range", self.name)));
                }
                c.base().check(coeff)?;
                let d = self.entry_degree(self, shape, i, j, Gen::new(a, b, k));
                if !shape.mode().same(d, 1) {
                    return Err(Error::DegreeMismatch(format!("{}: delta entry {i}->{j} is not of degree 1", self.name)));
                }
                if i <= j && coeff.constant_term() != num_traits::Zero::zero() {
                    return Err(Error::Invalid(format!(
                        "{}: leading delta entry {i}->{j} is not strictly upper triangular",
                        self.name
                    )));
                }
            }
        }
        Ok(())
    }
}

struct Enumerator<'a, S: Structure + ?Sized> {
    c: &'a S,
    path: &'a [&'a TwistedComplex],
    inputs: &'a [TwMatrix],
    rule: AddSignRule,
    max_arity: usize,
    out: TwMatrix,
}

#[derive(Clone)]
struct Step {
    m: Morphism,
    reduced: i64,
    shift: i64,
}

impl<S: Structure + ?Sized> Enumerator<'_, S> {
    fn sign(&self, steps: &[Step]) -> bool {
        let mut n = 0i64;
        for i in 0..steps.len() {
            for j in 0..i {
                n += match self.rule {
                    AddSignRule::Standard => steps[i].reduced * steps[j].shift,
                    AddSignRule::Transposed => steps[j].reduced * steps[i].shift,
                };
            }
        }
        parity(n)
    }

    fn record(&mut self, start: usize, end: usize, steps: &[Step]) {
        let v = if steps.is_empty() {
            self.c.nullary(self.path[0].summands[start].0)
        } else {
            let args: Vec<Morphism> = steps.iter().map(|s| s.m.clone()).collect();
            self.c.eval(&args)
        };
        if v.is_zero() {
            return;
        }
        let v = if self.sign(steps) { v.neg() } else { v };
        let e = self.out.entry((start, end)).or_default();
        e.add_assign(&v);
        if e.is_zero() {
            self.out.remove(&(start, end));
        }
    }

    /// Splits an entry into pieces of equal degree and pushes each.
    fn push_entry(
        &mut self,
        start: usize,
        steps: &mut Vec<Step>,
        (from_cx, i): (&TwistedComplex, usize),
        (to_cx, j): (&TwistedComplex, usize),
        v: &VectorB,
        next_pos: usize,
    ) {
        let shape = self.c.shape();
        let (a, b) = (from_cx.summands[i].0, to_cx.summands[j].0);
        let shift = to_cx.summands[j].1 - from_cx.summands[i].1;
        let mut by_degree: BTreeMap<i64, VectorB> = BTreeMap::new();
        for (k, coeff) in v.iter() {
            by_degree.entry(shape.hom(a, b).degree(k)).or_default().add_at(k, coeff);
        }
        for (d, part) in by_degree {
            steps.push(Step { m: Morphism::new(a, b, part), reduced: d - 1, shift });
            self.walk(next_pos, start, j, steps);
            steps.pop();
        }
    }

    fn walk(&mut self, pos: usize, start: usize, at: usize, steps: &mut Vec<Step>) {
        let k = self.inputs.len();
        if pos == k {
            self.record(start, at, steps);
        }
        if steps.len() >= self.max_arity {
            return;
        }
        let cx = self.path[pos];
        let deltas: Vec<(usize, VectorB)> =
            cx.delta.iter().filter(|((i, _), _)| *i == at).map(|((_, j), v)| (*j, v.clone())).collect();
        for (j, v) in deltas {
            self.push_entry(start, steps, (cx, at), (cx, j), &v, pos);
        }
        if pos < k {
            let next = self.path[pos + 1];
            let entries: Vec<(usize, VectorB)> =
                self.inputs[pos].iter().filter(|((i, _), _)| *i == at).map(|((_, j), v)| (*j, v.clone())).collect();
            for (j, v) in entries {
                self.push_entry(start, steps, (cx, at), (next, j), &v, pos + 1);
            }
        }
    }
}

/// `μ_Tw(α_k, …, α_1)` with inputs in path order between the complexes of `path`
/// (`path.len() == inputs.len() + 1`). With no inputs this is the curvature of `path[0]`.
pub fn tw_product_with<S: Structure + ?Sized>(
    c: &S,
    path: &[&TwistedComplex],
    inputs: &[TwMatrix],
    rule: AddSignRule,
) -> Result<TwMatrix> {
    if path.len() != inputs.len() + 1 {
        return Err(Error::NotComposable("need one complex more than inputs".into()));
    }
    for (p, m) in inputs.iter().enumerate() {
        for &(i, j) in m.keys() {
            if i >= path[p].len() || j >= path[p + 1].len() {
                return Err(Error::NotComposable(format!("input {} has an entry outside its complexes", p + 1)));
            }
        }
    }
    let max_arity = if c.complete() { c.table().max_arity().min(c.k_max()) } else { c.k_max() };
    let mut e = Enumerator { c, path, inputs, rule, max_arity, out: TwMatrix::new() };
    for start in 0..path[0].len() {
        e.walk(0, start, start, &mut Vec::new());
    }
    Ok(e.out)
}

pub fn tw_product<S: Structure + ?Sized>(c: &S, path: &[&TwistedComplex], inputs: &[TwMatrix]) -> Result<TwMatrix> {
    tw_product_with(c, path, inputs, AddSignRule::Standard)
}

/// The product of the additive completion: δ is ignored.
pub fn add_product<S: Structure + ?Sized>(c: &S, path: &[&TwistedComplex], inputs: &[TwMatrix]) -> Result<TwMatrix> {
    let bare: Vec<TwistedComplex> = path.iter().map(|x| TwistedComplex::new(x.name.clone(), x.summands.clone(), TwMatrix::new())).collect();
    let refs: Vec<&TwistedComplex> = bare.iter().collect();
    tw_product(c, &refs, inputs)
}

/// Curvature `μ⁰ + μ¹(δ) + μ²(δ, δ) + …` of a twisted complex.
pub fn tw_curvature<S: Structure + ?Sized>(c: &S, x: &TwistedComplex) -> Result<TwMatrix> {
    tw_product(c, &[x], &[])
}

fn format_matrix(shape: &Shape, x: &TwistedComplex, m: &TwMatrix) -> String {
    m.iter()
        .map(|(&(i, j), v)| format!("[{i}->{j}] {}", shape.format_vector(x.summands[i].0, x.summands[j].0, v)))
        .collect::<Vec<_>>()
        .join("; ")
}

/// Maurer-Cartan sum of the leading differential in the undeformed category.
pub fn check_mc(x: &TwistedComplex, c: &AInfCategory) -> Report {
    let mut report = Report::new("twisted differential Maurer-Cartan equation")
        .with("complex", &x.name)
        .with("summands", x.len());
    let lead = TwistedComplex::new(x.name.clone(), x.summands.clone(), x.delta0());
    if let Err(e) = lead.validate(c) {
        report.violate("invariant", &x.name, e.to_string());
        return report;
    }
    match tw_curvature(c, &lead) {
        Ok(mc) => {
            report.checked = 1;
            if !mc.is_empty() {
                report.violate("MC", &x.name, format_matrix(c.shape(), x, &mc));
            }
        }
        Err(e) => report.violate("MC", &x.name, e.to_string()),
    }
    report
}

/// A finite full subcategory of the twisted completion, with products materialized on basis
/// tuples up to a bound.
#[derive(Clone, Debug)]
pub struct TwistedCategory {
    pub complexes: Vec<TwistedComplex>,
    pub products: Products,
    entries: BTreeMap<(usize, usize), Vec<(usize, usize, usize)>>,
}

impl TwistedCategory {
    pub fn build<S: Structure + ?Sized>(c: &S, complexes: Vec<TwistedComplex>, bound: usize, rule: AddSignRule) -> Result<Self> {
        let shape = c.shape();
        for x in &complexes {
            x.validate(c)?;
        }
        let n = complexes.len();
        let mut homs = BTreeMap::new();
        let mut entries = BTreeMap::new();
        for (xi, x) in complexes.iter().enumerate() {
            for (yi, y) in complexes.iter().enumerate() {
                let mut elements = Vec::new();
                let mut list = Vec::new();
                for (i, &(a, _)) in x.summands.iter().enumerate() {
                    for (j, &(b, _)) in y.summands.iter().enumerate() {
                        for g in shape.gens(a, b) {
                            elements.push((format!("{}:{}>{}", shape.gen_name(g), i, j), x.entry_degree(y, shape, i, j, g)));
                            list.push((i, j, g.idx()));
                        }
                    }
                }
                homs.insert((xi, yi), GradedBasis::new(shape.mode(), elements)?);
                entries.insert((xi, yi), list);
            }
        }
        let identities = complexes
            .iter()
            .enumerate()
            .map(|(xi, x)| match x.summands.as_slice() {
                [(a, _)] => shape.identity(*a).map(|id| entries[&(xi, xi)].iter().position(|e| *e == (0, 0, id)).expect("entry")),
                _ => None,
            })
            .collect();
        let tw_shape = Arc::new(Shape::new(shape.mode(), complexes.iter().map(|x| x.name.clone()).collect(), homs, identities)?);
        let mut cat = TwistedCategory {
            complexes,
            products: Products::new(tw_shape.clone(), c.base().clone(), Multilinear::new(), bound, false),
            entries,
        };
        let mut table = Multilinear::new();
        for x in 0..n {
            let m = tw_product_with(c, &[&cat.complexes[x]], &[], rule)?;
            table.add_nullary(x, &cat.to_vector(x, x, &m));
        }
        for len in 1..=bound {
            let results: Vec<Result<(Vec<Gen>, VectorB)>> = tw_shape
                .tuples(len)
                .into_par_iter()
                .map(|t| {
                    let objs = Shape::path_objects(&t, t[0].src());
                    let path: Vec<&TwistedComplex> = objs.iter().map(|&o| &cat.complexes[o]).collect();
                    let inputs: Vec<TwMatrix> = t.iter().map(|&g| cat.to_matrix(g.src(), g.tgt(), &VectorB::unit(g.idx()))).collect();
                    let m = tw_product_with(c, &path, &inputs, rule)?;
                    Ok((t.clone(), cat.to_vector(objs[0], objs[len], &m)))
                })
                .collect();
            for r in results {
                let (t, v) = r?;
                table.add_term(t, &v);
            }
        }
        cat.products.table = table;
        Ok(cat)
    }

    pub fn shape(&self) -> &Shape {
        &self.products.shape
    }

    /// Tw-basis vector from a matrix of C-vectors.
    pub fn to_vector(&self, x: usize, y: usize, m: &TwMatrix) -> VectorB {
        let list = &self.entries[&(x, y)];
        let mut out = VectorB::zero();
        for (k, &(i, j, g)) in list.iter().enumerate() {
            if let Some(c) = m.get(&(i, j)).and_then(|v| v.get_ref(g)) {
                out.add_at(k, c);
            }
        }
        out
    }

    pub fn to_matrix(&self, x: usize, y: usize, v: &VectorB) -> TwMatrix {
        let list = &self.entries[&(x, y)];
        let mut out = TwMatrix::new();
        for (k, c) in v.iter() {
            let (i, j, g) = list[k];
            out.entry((i, j)).or_default().add_at(g, c);
        }
        out
    }
}

/// The uncurving of a deformation by `r`: `r_X` becomes the twisted differential of `X`.
pub fn uncurve(d: &AInfDeformation, r: &BTreeMap<usize, VectorB>) -> Result<AInfDeformation> {
    let shape = d.shape();
    for (x, v) in r {
        if *x >= shape.num_objects() {
            return Err(Error::Invalid(format!("uncurving element at unknown object {x}")));
        }
        if !v.madic_order().at_least(1) {
            return Err(Error::NotInfinitesimal(format!("uncurving element at {}", shape.object_name(*x))));
        }
        for (k, c) in v.iter() {
            d.base().check(c)?;
            if k >= shape.dim(*x, *x) || !shape.mode().same(shape.hom(*x, *x).degree(k), 1) {
                return Err(Error::DegreeMismatch(format!("uncurving element at {} must have degree 1", shape.object_name(*x))));
            }
        }
    }
    let products = uncurved_table(d.base(), d.table(), r);
    d.with_products(products, d.k_max(), d.complete())
}

/// Sums over deleting endomorphism inputs that `r` can fill, weighted by `r`'s coefficients.
pub fn uncurved_table(base: &crate::base::BaseSpec, table: &Multilinear, r: &BTreeMap<usize, VectorB>) -> Multilinear {
    let mut out = Multilinear::new();
    for (x, v) in &table.nullary {
        out.add_nullary(*x, v);
    }
    let pieces: Vec<Multilinear> = table
        .terms
        .par_iter()
        .map(|(key, value)| {
            let mut local = Multilinear::new();
            let fillable: Vec<usize> = (0..key.len())
                .filter(|&i| {
                    let g = key[i];
                    g.src() == g.tgt() && r.get(&g.src()).is_some_and(|v| v.get_ref(g.idx()).is_some())
                })
                .collect();
            let mut kept = Vec::with_capacity(key.len());
            subsets(base, key, &fillable, 0, r, Coefficient::one(), &mut kept, value, &mut local);
            local
        })
        .collect();
    for p in pieces {
        out.add_assign(&p);
    }
    out
}

#[allow(clippy::too_many_arguments)]
fn subsets(
    base: &crate::base::BaseSpec,
    key: &[Gen],
    fillable: &[usize],
    pos: usize,
    r: &BTreeMap<usize, VectorB>,
    coeff: Coefficient,
    kept: &mut Vec<Gen>,
    value: &VectorB,
    out: &mut Multilinear,
) {
    if coeff.is_zero() {
        return;
    }
    if pos == key.len() {
        let v = value.scale(base, &coeff);
        if kept.is_empty() {
            out.add_nullary(key[0].src(), &v);
        } else {
            out.add_term(kept.clone(), &v);
        }
        return;
    }
    let g = key[pos];
    kept.push(g);
    subsets(base, key, fillable, pos + 1, r, coeff.clone(), kept, value, out);
    kept.pop();
    if fillable.contains(&pos) {
        let c = r[&g.src()].get(g.idx());
        subsets(base, key, fillable, pos + 1, r, base.mul(&coeff, &c), kept, value, out);
    }
}

/// The gauge functor `F⁰ = r`, `F¹ = Id` from `uncurve(d, r)` to `d`.
pub fn uncurving_gauge(d: &AInfDeformation, uncurved: &AInfDeformation, r: &BTreeMap<usize, VectorB>) -> Result<DeformedFunctor> {
    DeformedFunctor::gauge(Arc::new(Products::of(uncurved)), Arc::new(Products::of(d)), r)
}

/// `μ⁰ + μ¹(S) + μ²(S, S) + …` at `x`.
pub fn mc_sum(d: &AInfDeformation, x: usize, s: &VectorB) -> VectorB {
    let mut r = BTreeMap::new();
    if !s.is_zero() {
        r.insert(x, s.clone());
    }
    uncurved_table(d.base(), d.table(), &r).nullary_at(x).cloned().unwrap_or_default()
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum UncurveOutcome {
    /// An element `S ∈ m End¹(X)` with vanishing Maurer-Cartan sum.
    Uncurved(VectorB),
    /// The lowest remaining curvature slice has a nonzero cohomology component (given in
    /// `H`-coordinates). Strategy-independent at order 1.
    Obstructed { order: u32, class: VectorB },
}

/// Greedy order-by-order solve of `μ⁰ + μ¹(S) + μ²(S, S) + … = 0` at `x`.
pub fn attempt_uncurve_object(d: &AInfDeformation, sp: &HomologicalSplitting, x: usize) -> Result<UncurveOutcome> {
    if x >= d.shape().num_objects() {
        return Err(Error::Invalid(format!("unknown object {x}")));
    }
    let hom = sp.hom(x, x);
    let base = d.base();
    let mut s = VectorB::zero();
    for order in 1..base.truncation() {
        let curv = mc_sum(d, x, &s);
        let slice = curv.slice(order);
        if !curv.sub(&slice).madic_order().at_least(order) {
            return Err(Error::Invalid("lower curvature slices did not vanish".into()));
        }
        if slice.is_zero() {
            continue;
        }
        let class = sp.pi_coordinates(x, x, &slice);
        if !class.is_zero() {
            return Ok(UncurveOutcome::Obstructed { order, class });
        }
        let step = crate::splitting::apply_q(hom.codifferential(), &slice);
        s.sub_assign(&step);
    }
    if !mc_sum(d, x, &s).is_zero() {
        return Err(Error::Invalid("greedy solution leaves curvature".into()));
    }
    Ok(UncurveOutcome::Uncurved(s))
}
