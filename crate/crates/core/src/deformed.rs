//! Deformed decompositions, curvature optimization and deformed minimal models.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_traits::Zero;
use rayon::prelude::*;

use crate::ainf::{AInfCategory, AInfDeformation, Gen, Morphism, Multilinear, Products, Structure};
use crate::base::{BaseSpec, Monomial, Order};
use crate::error::{Error, Result};
use crate::functor::DeformedFunctor;
use crate::graded::{LinearMapB, VectorB};
use crate::kadeishvili::{minimal_model, TreeSums};
use crate::linalg::QMatrix;
use crate::report::Report;
use crate::splitting::HomologicalSplitting;
use crate::twisted::uncurve;

/// The deformed decomposition `H_q ⊕ μ_q¹(B⊗R) ⊕ B⊗R` of one hom space.
#[derive(Clone, Debug)]
pub struct HomDecomposition {
    /// `μ_q¹` on the hom basis.
    pub mu1: LinearMapB,
    pub d: LinearMapB,
    pub e: LinearMapB,
    pub f: LinearMapB,
    /// Deformed counterparts `h − Eh` of the `H` basis vectors.
    pub hq: Vec<VectorB>,
    /// Inverse of `[H | μ_q¹R | R]`.
    pub undeformed_coords: LinearMapB,
    /// Inverse of `[H_q | μ_q¹R | R]`.
    pub coords: LinearMapB,
    pub codiff: LinearMapB,
    pub proj: LinearMapB,
    /// `φπ_q`: `H`-coordinates of the `H_q` component.
    pub phi: LinearMapB,
    r: LinearMapB,
    dh: usize,
    dr: usize,
}

impl HomDecomposition {
    fn compute(base: &BaseSpec, mu1: LinearMapB, h: &[Vec<crate::base::Q>], r: &[Vec<crate::base::Q>]) -> Result<Self> {
        let n = mu1.rows();
        let (dh, dr) = (h.len(), r.len());
        let hvecs: Vec<VectorB> = h.iter().map(|v| VectorB::from_q(v)).collect();
        let rvecs: Vec<VectorB> = r.iter().map(|v| VectorB::from_q(v)).collect();
        let imr: Vec<VectorB> = rvecs.iter().map(|v| mu1.apply(base, v)).collect();
        let assemble = |first: &[VectorB]| {
            let mut cols = first.to_vec();
            cols.extend(imr.iter().cloned());
            cols.extend(rvecs.iter().cloned());
            LinearMapB::from_columns(n, &cols)
        };
        let undeformed_coords = assemble(&hvecs).invert_leading(base)?;
        let hmat = LinearMapB::from_columns(n, &hvecs);
        let rmat = LinearMapB::from_columns(n, &rvecs);
        let block = |m: &LinearMapB, from: usize, len: usize| m.submatrix(&(from..from + len).collect::<Vec<_>>(), &(0..m.cols()).collect::<Vec<_>>());
        let on_h = undeformed_coords.compose(base, &mu1.compose(base, &hmat));
        let d = block(&on_h, 0, dh);
        let e = block(&on_h, dh, dr);
        let f = block(&on_h, dh + dr, dr);
        let hq: Vec<VectorB> = (0..dh).map(|a| hvecs[a].sub(&rmat.apply(base, &e.column(a)))).collect();
        let coords = assemble(&hq).invert_leading(base)?;
        let hqmat = LinearMapB::from_columns(n, &hq);
        let phi = block(&coords, 0, dh);
        let codiff = rmat.compose(base, &block(&coords, dh, dr));
        let proj = hqmat.compose(base, &phi);
        Ok(HomDecomposition { mu1, d, e, f, hq, undeformed_coords, coords, codiff, proj, phi, r: rmat, dh, dr })
    }

    pub fn dim(&self) -> usize {
        self.mu1.rows()
    }

    pub fn h_dim(&self) -> usize {
        self.dh
    }

    pub fn r_dim(&self) -> usize {
        self.dr
    }

    pub fn r_matrix(&self) -> &LinearMapB {
        &self.r
    }

    pub fn hq_matrix(&self) -> LinearMapB {
        LinearMapB::from_columns(self.dim(), &self.hq)
    }

    /// The change of basis `[H_q | μ_q¹R | R]`.
    pub fn change_of_basis(&self, base: &BaseSpec) -> LinearMapB {
        let mut cols = self.hq.clone();
        cols.extend((0..self.dr).map(|a| self.mu1.apply(base, &self.r.column(a))));
        cols.extend((0..self.dr).map(|a| self.r.column(a)));
        LinearMapB::from_columns(self.dim(), &cols)
    }

    /// Coordinates of `v` in the three summands: `(H_q, μ_q¹R, R)`.
    pub fn components(&self, base: &BaseSpec, v: &VectorB) -> (VectorB, VectorB, VectorB) {
        let c = self.coords.apply(base, v);
        let (dh, dr) = (self.dh, self.dr);
        let part = |from: usize, len: usize| {
            let idx: Vec<usize> = (from..from + len).collect();
            c.restrict(&idx)
        };
        (part(0, dh), part(dh, dr), part(dh + dr, dr))
    }

    /// Projection onto `μ_q¹(B⊗R)` along the other two summands.
    pub fn image_projection(&self, base: &BaseSpec) -> LinearMapB {
        self.summand_projection(base, 1)
    }

    /// Projection onto `B⊗R` along the other two summands.
    pub fn r_projection(&self, base: &BaseSpec) -> LinearMapB {
        self.summand_projection(base, 2)
    }

    fn summand_projection(&self, base: &BaseSpec, which: usize) -> LinearMapB {
        let change = self.change_of_basis(base);
        let (from, len) = [(0, self.dh), (self.dh, self.dr), (self.dh + self.dr, self.dr)][which];
        let idx: Vec<usize> = (from..from + len).collect();
        let all: Vec<usize> = (0..self.dim()).collect();
        change.submatrix(&all, &idx).compose(base, &self.coords.submatrix(&idx, &all))
    }

    /// `μ_q¹` written in the deformed decomposition.
    pub fn mu1_in_decomposition(&self, base: &BaseSpec) -> LinearMapB {
        self.coords.compose(base, &self.mu1.compose(base, &self.change_of_basis(base)))
    }

    fn block_indices(&self, which: usize) -> Vec<usize> {
        let (from, len) = [(0, self.dh), (self.dh, self.dr), (self.dh + self.dr, self.dr)][which];
        (from..from + len).collect()
    }

    /// Invariant violations of the decomposition.
    pub fn violations(&self, base: &BaseSpec) -> Vec<String> {
        let mut out = Vec::new();
        let m = self.mu1_in_decomposition(base);
        let block = |i: usize, j: usize| m.submatrix(&self.block_indices(i), &self.block_indices(j));
        if !block(1, 0).is_zero() {
            out.push("mu1(H_q) has a component in mu1(B R)".to_string());
        }
        if !block(0, 2).is_zero() || !block(2, 2).is_zero() {
            out.push("mu1(B R) leaves mu1(B R)".to_string());
        }
        let back = self.codiff.compose(base, &self.mu1.compose(base, &self.r));
        if back != self.r {
            out.push("h_q mu1 is not the identity on B R".to_string());
        }
        let change = self.change_of_basis(base);
        if self.coords.compose(base, &change) != LinearMapB::identity(self.dim()) {
            out.push("change of basis is not inverted".to_string());
        }
        out
    }
}

/// Deformed decompositions of all hom spaces.
#[derive(Clone, Debug)]
pub struct DeformedDecomposition {
    base: BaseSpec,
    homs: BTreeMap<(usize, usize), HomDecomposition>,
}

impl DeformedDecomposition {
    pub fn base(&self) -> &BaseSpec {
        &self.base
    }

    pub fn hom(&self, x: usize, y: usize) -> &HomDecomposition {
        &self.homs[&(x, y)]
    }

    pub fn homs(&self) -> impl Iterator<Item = (&(usize, usize), &HomDecomposition)> {
        self.homs.iter()
    }

    /// The deformed counterpart of an `H` generator.
    pub fn include(&self, g: Gen) -> Morphism {
        Morphism::new(g.src(), g.tgt(), self.hom(g.src(), g.tgt()).hq[g.idx()].clone())
    }

    pub fn apply_codiff(&self, m: &Morphism) -> VectorB {
        self.hom(m.src, m.tgt).codiff.apply(&self.base, &m.value)
    }

    pub fn apply_proj(&self, m: &Morphism) -> VectorB {
        self.hom(m.src, m.tgt).proj.apply(&self.base, &m.value)
    }

    /// `φπ_q` of a hom-space vector, in `H`-coordinates.
    pub fn phi_coordinates(&self, x: usize, y: usize, v: &VectorB) -> VectorB {
        self.hom(x, y).phi.apply(&self.base, v)
    }

    pub fn check(&self) -> Report {
        let mut report = Report::new("deformed decomposition").with("hom spaces", self.homs.len());
        for ((x, y), h) in &self.homs {
            for v in h.violations(&self.base) {
                report.violate("decomposition", format!("Hom({x}, {y})"), v);
            }
        }
        report
    }

    /// Curvature components outside `H_q`, per object.
    pub fn curvature_excess<S: Structure + ?Sized>(&self, c: &S) -> BTreeMap<usize, (VectorB, VectorB)> {
        let mut out = BTreeMap::new();
        for x in 0..c.shape().num_objects() {
            let mu0 = c.nullary(x);
            if mu0.is_zero() {
                continue;
            }
            let (_, im, r) = self.hom(x, x).components(&self.base, &mu0);
            if !im.is_zero() || !r.is_zero() {
                out.insert(x, (im, r));
            }
        }
        out
    }
}

/// `D, E, F`, `H_q`, `h_q`, `π_q` and `φ` for every hom space.
pub fn compute_def_operators<S: Structure + ?Sized>(dq: &S, sp: &HomologicalSplitting) -> Result<DeformedDecomposition> {
    let shape = dq.shape();
    if shape != sp.shape().as_ref() {
        return Err(Error::DimensionMismatch("splitting belongs to a different category".into()));
    }
    let base = dq.base().clone();
    let pairs: Vec<(usize, usize)> = (0..shape.num_objects()).flat_map(|x| (0..shape.num_objects()).map(move |y| (x, y))).collect();
    let homs: Vec<((usize, usize), HomDecomposition)> = pairs
        .into_par_iter()
        .map(|(x, y)| {
            let n = shape.dim(x, y);
            let cols: Vec<VectorB> = shape.gens(x, y).map(|g| dq.eval(&[Morphism::basis(g)])).collect();
            let mu1 = LinearMapB::from_columns(n, &cols);
            let s = sp.hom(x, y);
            Ok(((x, y), HomDecomposition::compute(&base, mu1, &s.h, &s.r)?))
        })
        .collect::<Result<_>>()?;
    let dd = DeformedDecomposition { base, homs: homs.into_iter().collect() };
    let report = dd.check();
    if !report.is_ok() {
        return Err(Error::Invalid(format!("deformed decomposition invariants fail: {}", report.to_text())));
    }
    Ok(dd)
}

/// One step of the curvature optimization.
#[derive(Clone, Debug)]
pub struct OptimizationStep {
    pub gauge: BTreeMap<usize, VectorB>,
    pub order: Order,
}

#[derive(Clone, Debug)]
pub struct OptimizationTrace {
    pub iterations: Vec<OptimizationStep>,
    pub total: BTreeMap<usize, VectorB>,
    pub optimized: AInfDeformation,
    pub decomposition: DeformedDecomposition,
}

impl OptimizationTrace {
    /// `F⁰ = −r`, `F¹ = Id` from the optimized deformation to `original`.
    pub fn gauge_functor(&self, original: &AInfDeformation) -> Result<DeformedFunctor> {
        DeformedFunctor::gauge(Arc::new(Products::of(&self.optimized)), Arc::new(Products::of(original)), &negate(&self.total))
    }

    pub fn check(&self) -> Report {
        let truncation = self.optimized.base().truncation();
        let bound = (truncation.max(1) as f64).log2().ceil() as usize + 1;
        let mut report = Report::new("curvature optimization")
            .with("iterations", self.iterations.len())
            .with("iteration bound", bound)
            .with("truncation", truncation);
        for (i, step) in self.iterations.iter().enumerate() {
            if !step.order.at_least(1u32 << i.min(31)) {
                report.violate("order", format!("iteration {i}"), format!("gauge has order {} below 2^{i}", step.order));
            }
        }
        if self.iterations.len() > bound {
            report.violate("termination", "loop", format!("{} iterations", self.iterations.len()));
        }
        let shape = self.optimized.shape();
        report.checked = self.iterations.len() + shape.num_objects();
        for (x, (im, r)) in self.decomposition.curvature_excess(&self.optimized) {
            report.violate(
                "optimal curvature",
                shape.object_name(x),
                format!("components outside H_q: image {im}, R {r}"),
            );
        }
        report
    }
}

fn negate(r: &BTreeMap<usize, VectorB>) -> BTreeMap<usize, VectorB> {
    r.iter().map(|(x, v)| (*x, v.neg())).collect()
}

/// Iterated uncurving by `−h_q(μ⁰)` until the gauges vanish in the truncation.
pub fn optimize_curvature(dq: &AInfDeformation, sp: &HomologicalSplitting) -> Result<OptimizationTrace> {
    let truncation = dq.base().truncation();
    let mut current = dq.clone();
    let mut iterations = Vec::new();
    let mut total: BTreeMap<usize, VectorB> = BTreeMap::new();
    for i in 0.. {
        let dd = compute_def_operators(&current, sp)?;
        let mut gauge = BTreeMap::new();
        for x in 0..current.shape().num_objects() {
            let v = dd.apply_codiff(&Morphism::new(x, x, current.curvature(x)));
            if !v.is_zero() {
                gauge.insert(x, v);
            }
        }
        let order = gauge.values().map(|v| v.madic_order()).min().unwrap_or(Order::Infinite);
        let done = gauge.is_empty();
        iterations.push(OptimizationStep { gauge: gauge.clone(), order });
        if done || (1u64 << i) >= truncation as u64 {
            if !done {
                return Err(Error::Invalid(format!("curvature optimization did not stabilise after {} iterations", i + 1)));
            }
            return Ok(OptimizationTrace { iterations, total, optimized: current, decomposition: dd });
        }
        current = uncurve(&current, &negate(&gauge))?;
        for (x, v) in gauge {
            total.entry(x).or_default().add_assign(&v);
        }
    }
    unreachable!()
}

/// Products on the cohomology shape (already conjugated by `φ`) and `F: H_q → C_q^opt`.
pub fn auxiliary_minimal_model(
    dq_opt: &AInfDeformation,
    dd: &DeformedDecomposition,
    sp: &HomologicalSplitting,
    bound: usize,
) -> Result<(Products, DeformedFunctor)> {
    if bound < 2 {
        return Err(Error::Invalid("minimal models need a bound of at least 2".into()));
    }
    if let Some((x, _)) = dd.curvature_excess(dq_opt).into_iter().next() {
        return Err(Error::NotOptimalCurvature(dq_opt.shape().object_name(x).to_string()));
    }
    let base = dq_opt.base().clone();
    let hc_shape = sp.hc_shape().clone();
    let include = |g: Gen| dd.include(g);
    let h = |m: &Morphism| dd.apply_codiff(m);
    let sums = TreeSums::compute(dq_opt, &hc_shape, &include, &h, bound);
    let mut table = Multilinear::new();
    let mut components = Multilinear::new();
    for x in 0..hc_shape.num_objects() {
        table.add_nullary(x, &dd.phi_coordinates(x, x, &dq_opt.curvature(x)));
    }
    for g in hc_shape.all_gens() {
        let inc = include(g);
        let mu1 = dq_opt.eval(&[inc.clone()]);
        table.add_term(vec![g], &dd.phi_coordinates(g.src(), g.tgt(), &mu1));
        components.add_term(vec![g], &inc.value);
    }
    for (t, l) in &sums.lambda {
        table.add_term(t.clone(), &dd.phi_coordinates(l.src, l.tgt, &l.value));
    }
    for (t, f) in &sums.higher {
        components.add_term(t.clone(), &f.value);
    }
    let products = Products::new(hc_shape.clone(), base, table, bound, false);
    let functor = DeformedFunctor::new(
        Arc::new(products.clone()),
        Arc::new(Products::of(dq_opt)),
        (0..hc_shape.num_objects()).collect(),
        components,
        bound,
        false,
    )?;
    Ok((products, functor))
}

/// A deformed minimal model together with the data it was built from.
#[derive(Clone, Debug)]
pub struct DeformedModel {
    pub hc: AInfDeformation,
    pub functor: DeformedFunctor,
    pub classical: AInfCategory,
    pub classical_functor: DeformedFunctor,
    pub trace: OptimizationTrace,
}

impl DeformedModel {
    /// Curved relations of `HC_q`, functor relations of `F_q`, and agreement modulo `m` with the
    /// classical construction.
    pub fn check(&self, max_inputs: usize) -> Report {
        let mut report = Report::new("deformed minimal model");
        report.merge(self.trace.check());
        report.merge(self.hc.check_relations(max_inputs));
        report.merge(self.functor.check(max_inputs));
        if self.hc.leading_products() != *self.classical.products() {
            report.violate("reduction", "products", "reduction modulo m differs from the classical minimal model");
        }
        let lead = self.functor.leading_term();
        if lead.components().terms != self.classical_functor.components().terms || !lead.components().nullary.is_empty() {
            report.violate("reduction", "functor", "reduction modulo m differs from the classical functor");
        }
        report
    }
}

/// `HC_q` with products up to arity `bound` and `F_q = (Id − r) ∘ F_q^opt ∘ φ⁻¹`.
pub fn deformed_minimal_model(dq: &AInfDeformation, sp: &HomologicalSplitting, bound: usize) -> Result<DeformedModel> {
    let (classical, classical_functor) = minimal_model(dq.reference(), sp, bound)?;
    let trace = optimize_curvature(dq, sp)?;
    let (products, f_opt) = auxiliary_minimal_model(&trace.optimized, &trace.decomposition, sp, bound)?;
    let hc = AInfDeformation::truncated(dq.base().clone(), Arc::new(classical.clone()), products.table, bound)?;
    let gauge = trace.gauge_functor(dq)?;
    let composite = DeformedFunctor::compose(&gauge, &f_opt, bound)?;
    let functor = DeformedFunctor::new(
        Arc::new(Products::of(&hc)),
        composite.target().clone(),
        composite.object_map().to_vec(),
        composite.components().clone(),
        bound,
        false,
    )?;
    Ok(DeformedModel { hc, functor, classical, classical_functor, trace })
}

/// `π_{μ_q¹(B⊗R)} = μ_q¹h_q` and `π_{B⊗R} = h_qμ_q¹ − h_qμ_q¹μ_q¹h_q` on every hom space.
pub fn check_projection_identities(dd: &DeformedDecomposition) -> Report {
    let base = dd.base();
    let mut report = Report::new("projection identities");
    for ((x, y), h) in dd.homs() {
        let loc = format!("Hom({x}, {y})");
        report.checked += 1;
        let mu_h = h.mu1.compose(base, &h.codiff);
        if h.image_projection(base) != mu_h {
            report.violate("image projection", loc.clone(), "differs from mu1 h_q");
        }
        let h_mu = h.codiff.compose(base, &h.mu1);
        let rhs = h_mu.sub(&h_mu.compose(base, &mu_h));
        if h.r_projection(base) != rhs {
            report.violate("R projection", loc, "differs from h_q mu1 - h_q mu1 mu1 h_q");
        }
    }
    report
}

/// `D² = 0`, `F = −ED`, and the consequences of `D = 0` when it holds.
pub fn check_d_zero(dq: &AInfDeformation, sp: &HomologicalSplitting, bound: usize) -> Result<Report> {
    if !dq.is_curvature_free() {
        return Err(Error::NotCurvatureFree("the D = 0 analysis needs a curvature-free deformation".into()));
    }
    let dd = compute_def_operators(dq, sp)?;
    let base = dd.base();
    let shape = dq.shape();
    let mut report = Report::new("D = 0 analysis");
    let mut d_zero = true;
    for ((x, y), h) in dd.homs() {
        let loc = format!("Hom({}, {})", shape.object_name(*x), shape.object_name(*y));
        report.checked += 1;
        if !h.d.compose(base, &h.d).is_zero() {
            report.violate("D^2 = 0", loc.clone(), "D does not square to zero");
        }
        if h.f != h.e.compose(base, &h.d).neg() {
            report.violate("F = -ED", loc.clone(), "F differs from -ED");
        }
        if !h.d.is_zero() {
            d_zero = false;
            report.note(format!("{loc}: D = {}", h.d.to_string().trim().replace('\n', "; ")));
        }
    }
    report.set("D = 0", d_zero);
    if d_zero {
        for ((x, y), h) in dd.homs() {
            let m = h.mu1_in_decomposition(base);
            let allowed: Vec<(usize, usize)> =
                h.block_indices(1).into_iter().flat_map(|i| h.block_indices(2).into_iter().map(move |j| (i, j))).collect();
            if m.entries().any(|(k, _)| !allowed.contains(k)) {
                report.violate("sparsity", format!("Hom({x}, {y})"), "mu1 has entries outside the image-from-R block");
            }
        }
        let model = deformed_minimal_model(dq, sp, bound)?;
        if !model.hc.products().nullary.is_empty() {
            report.violate("minimal model", "curvature", "HC_q has curvature");
        }
        if !model.hc.products().arity_component(1).is_zero() {
            report.violate("minimal model", "differential", "HC_q has a differential");
        }
    }
    Ok(report)
}

/// `μ_q¹` as a rational matrix on `B ⊗ Hom` with basis `(monomial, generator)`.
fn expanded_matrix(base: &BaseSpec, mu1: &LinearMapB, monomials: &[Monomial]) -> QMatrix {
    let n = mu1.rows();
    let index: BTreeMap<&Monomial, usize> = monomials.iter().enumerate().map(|(i, m)| (m, i)).collect();
    let size = n * monomials.len();
    let mut out = QMatrix::zeros(size, size);
    for (a, m) in monomials.iter().enumerate() {
        for j in 0..n {
            let v = mu1.apply(base, &VectorB::unit(j).shift_by(base, m));
            for (mm, part) in v.by_monomial(n) {
                let b = index[&mm];
                for (i, c) in part.into_iter().enumerate() {
                    if !c.is_zero() {
                        out.set(b * n + i, a * n + j, c);
                    }
                }
            }
        }
    }
    out
}

fn expand(v: &VectorB, n: usize, monomials: &[Monomial]) -> Vec<crate::base::Q> {
    let parts = v.by_monomial(n);
    let mut out = Vec::with_capacity(n * monomials.len());
    for m in monomials {
        match parts.get(m) {
            Some(p) => out.extend(p.iter().cloned()),
            None => out.extend(std::iter::repeat_n(crate::base::Q::from_integer(0.into()), n)),
        }
    }
    out
}

fn collapse(v: &[crate::base::Q], n: usize, monomials: &[Monomial]) -> VectorB {
    let parts: BTreeMap<Monomial, Vec<crate::base::Q>> =
        monomials.iter().enumerate().map(|(a, m)| (m.clone(), v[a * n..(a + 1) * n].to_vec())).collect();
    VectorB::from_monomial_parts(&parts)
}

/// The maps `φ: (h, μ_q¹r′, r) ↦ h` and `ψ: h ↦ h − Eh` between `(Hom, μ_q¹)` and `(B⊗H, D)`.
pub fn cohomology_comparison(dq: &AInfDeformation, sp: &HomologicalSplitting) -> Result<Report> {
    if !dq.is_curvature_free() {
        return Err(Error::NotCurvatureFree("cohomology comparison needs a curvature-free deformation".into()));
    }
    let dd = compute_def_operators(dq, sp)?;
    let base = dd.base();
    let shape = dq.shape();
    let monomials = base.normal_monomials();
    let mut report = Report::new("cohomology comparison").with("ring dimension", monomials.len());
    let mut projective = true;
    let (mut actual_total, mut true_total) = (0usize, 0usize);
    for ((x, y), h) in dd.homs() {
        let n = h.dim();
        if n == 0 {
            continue;
        }
        let loc = format!("Hom({}, {})", shape.object_name(*x), shape.object_name(*y));
        report.checked += 1;
        let all: Vec<usize> = (0..n).collect();
        let phi = h.undeformed_coords.submatrix(&(0..h.h_dim()).collect::<Vec<_>>(), &all);
        let psi = h.hq_matrix();
        if phi.compose(base, &h.mu1) != h.d.compose(base, &phi) {
            report.violate("chain map", format!("{loc} phi"), "phi mu1 differs from D phi");
        }
        if psi.compose(base, &h.d) != h.mu1.compose(base, &psi) {
            report.violate("chain map", format!("{loc} psi"), "psi D differs from mu1 psi");
        }
        if phi.compose(base, &psi) != LinearMapB::identity(h.h_dim()) {
            report.violate("inverse", format!("{loc} phi psi"), "phi psi is not the identity");
        }
        let big = expanded_matrix(base, &h.mu1, &monomials);
        let kernel = big.kernel();
        let rank = big.rank();
        let round = psi.compose(base, &phi).sub(&LinearMapB::identity(n));
        let mut cols: Vec<Vec<crate::base::Q>> = (0..big.cols()).map(|j| big.column(j)).collect();
        for k in &kernel {
            let v = collapse(k, n, &monomials);
            cols.push(expand(&round.apply(base, &v), n, &monomials));
        }
        if QMatrix::from_columns(big.rows(), &cols).rank() != rank {
            report.violate("quasi-inverse", loc.clone(), "psi phi - id leaves the image of mu1 on cycles");
        }
        let actual = kernel.len() - rank;
        let expected = h.h_dim() * monomials.len();
        actual_total += actual;
        true_total += expected;
        if !h.d.is_zero() {
            projective = false;
        }
        if actual != expected {
            report.note(format!("{loc}: actual cohomology has rational dimension {actual}, true cohomology {expected}"));
        }
    }
    report.set("actual cohomology dimension", actual_total);
    report.set("true cohomology dimension", true_total);
    report.set("projective", projective);
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::base::BaseSpec;
    use crate::instances::*;
    use crate::splitting::{compute_splitting, split};

    fn one_var(n: u32) -> BaseSpec {
        BaseSpec::new(1, n, &[]).unwrap()
    }

    #[test]
    fn undeformed_decomposition_is_classical() {
        let c = dg_four(crate::graded::GradingMode::Z);
        let sp = split(&c).unwrap();
        let d = AInfDeformation::trivial(one_var(3), c.clone());
        let dd = compute_def_operators(&d, &sp).unwrap();
        for ((x, y), h) in dd.homs() {
            assert!(h.d.is_zero() && h.e.is_zero() && h.f.is_zero());
            let s = sp.hom(*x, *y);
            assert_eq!(h.codiff, LinearMapB::from_q(s.codifferential()));
            assert_eq!(h.proj, LinearMapB::from_q(s.projection()));
        }
    }

    #[test]
    fn two_term_table_instance() {
        let base = one_var(3);
        let d = two_term_deformed(&base);
        let sp = compute_splitting(d.reference().as_ref()).unwrap();
        let dd = compute_def_operators(&d, &sp).unwrap();
        let h = dd.hom(0, 1);
        assert_eq!(h.r_dim(), 0);
        assert!(!h.d.is_zero());
        assert!(h.e.is_zero() && h.f.is_zero());
        let r = check_d_zero(&d, &sp, 3).unwrap();
        assert!(r.is_ok(), "{}", r.to_text());
        assert_eq!(r.get("D = 0"), Some("false"));
        let c = cohomology_comparison(&d, &sp).unwrap();
        assert!(c.is_ok(), "{}", c.to_text());
        assert_eq!(c.get("projective"), Some("false"));
        assert_ne!(c.get("actual cohomology dimension"), c.get("true cohomology dimension"));
    }

    #[test]
    fn massey_curvature_is_optimized_away() {
        let base = one_var(4);
        let c = massey(1);
        let sp = split(&c).unwrap();
        let e1 = c.shape().hom(0, 0).index_of("e1").unwrap();
        let mut table = c.products().clone();
        table.add_nullary(0, &VectorB::single(e1, base.var(0)));
        let d = AInfDeformation::new(base.clone(), c.clone(), table, c.k_max()).unwrap();
        let trace = optimize_curvature(&d, &sp).unwrap();
        assert!(trace.check().is_ok(), "{}", trace.check().to_text());
        assert!(trace.optimized.is_curvature_free());
        let u = c.shape().hom(0, 0).index_of("u").unwrap();
        assert_eq!(trace.iterations[0].gauge[&0], VectorB::single(u, -base.var(0)));
        let g = trace.gauge_functor(&d).unwrap();
        assert!(g.check(3).is_ok());
        assert!(check_projection_identities(&trace.decomposition).is_ok());
    }

    #[test]
    fn deformed_model_of_curved_massey() {
        let base = one_var(3);
        let c = massey(1);
        let sp = split(&c).unwrap();
        let hom = c.shape().hom(0, 0);
        let (e1, w) = (hom.index_of("e1").unwrap(), hom.index_of("w").unwrap());
        let mut table = c.products().clone();
        table.add_nullary(0, &VectorB::single(e1, base.var(0)).add(&VectorB::single(w, base.var(0))));
        let d = AInfDeformation::new(base.clone(), c.clone(), table, c.k_max()).unwrap();
        let model = deformed_minimal_model(&d, &sp, 4).unwrap();
        let r = model.check(4);
        assert!(r.is_ok(), "{}", r.to_text());
        assert!(!model.hc.is_curvature_free());
    }

    #[test]
    fn minimal_deformation_is_its_own_model() {
        let base = one_var(3);
        let d = dual_numbers_deformed(&base);
        let sp = compute_splitting(d.reference().as_ref()).unwrap();
        let model = deformed_minimal_model(&d, &sp, 3).unwrap();
        assert_eq!(model.hc.products().truncate_arity(2), d.products().truncate_arity(2));
        assert!(model.check(3).is_ok());
    }

    #[test]
    fn exact_pair_checks() {
        let base = one_var(4);
        let d = exact_pair_deformed(&base);
        assert!(d.check_relations(4).is_ok());
        let sp = compute_splitting(d.reference().as_ref()).unwrap();
        let r = check_d_zero(&d, &sp, 3).unwrap();
        assert!(r.is_ok(), "{}", r.to_text());
        assert_eq!(r.get("D = 0"), Some("false"));
        let mut gauge = BTreeMap::new();
        gauge.insert(0, VectorB::single(1, base.var(0)));
        let curved = uncurve(&d, &gauge).unwrap();
        assert!(!curved.is_curvature_free());
        let model = deformed_minimal_model(&curved, &sp, 4).unwrap();
        let report = model.check(4);
        assert!(report.is_ok(), "{}", report.to_text());
    }
}
