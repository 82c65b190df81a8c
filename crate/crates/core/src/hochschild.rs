//! The Hochschild DGLA of a finite A∞-category with coefficients in the base.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::ainf::{AInfCategory, AInfDeformation, Gen, Multilinear, Shape, Structure};
use crate::base::{BaseSpec, Order, Q};
use crate::error::{Error, Result};
use crate::graded::{parity, VectorB};
use crate::linalg::QMatrix;

/// A cochain with a fixed reduced degree `‖η‖`, stored as a multilinear table.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct HochschildCochain {
    pub components: Multilinear,
    pub degree: i64,
}

impl HochschildCochain {
    pub fn zero(degree: i64) -> Self {
        HochschildCochain { components: Multilinear::new(), degree }
    }

    pub fn is_zero(&self) -> bool {
        self.components.is_zero()
    }

    pub fn max_arity(&self) -> usize {
        self.components.max_arity()
    }

    pub fn madic_order(&self) -> Order {
        self.components.madic_order()
    }

    pub fn neg(&self) -> Self {
        HochschildCochain { components: self.components.neg(), degree: self.degree }
    }

    pub fn scale_q(&self, c: &Q) -> Self {
        HochschildCochain { components: self.components.scale_q(c), degree: self.degree }
    }

    pub fn arity_component(&self, k: usize) -> Self {
        HochschildCochain { components: self.components.arity_component(k), degree: self.degree }
    }
}

/// The Hochschild complex of a category, with cochains truncated at arity `a_max`.
#[derive(Clone, Debug)]
pub struct Hochschild {
    category: Arc<AInfCategory>,
    base: BaseSpec,
    a_max: usize,
    mu: HochschildCochain,
}

impl Hochschild {
    pub fn new(category: impl Into<Arc<AInfCategory>>, base: BaseSpec, a_max: usize) -> Result<Self> {
        let category = category.into();
        if category.k_max() > a_max {
            return Err(Error::ArityOverflow { needed: category.k_max(), bound: a_max });
        }
        let mu = HochschildCochain { components: category.products().clone(), degree: 1 };
        Ok(Hochschild { category, base, a_max, mu })
    }

    pub fn category(&self) -> &Arc<AInfCategory> {
        &self.category
    }

    pub fn shape(&self) -> &Shape {
        self.category.shape()
    }

    pub fn base(&self) -> &BaseSpec {
        &self.base
    }

    pub fn a_max(&self) -> usize {
        self.a_max
    }

    /// The structure cochain `μ_C`, of reduced degree 1.
    pub fn structure(&self) -> &HochschildCochain {
        &self.mu
    }

    fn norm(&self, d: i64) -> i64 {
        self.shape().mode().normalize(d)
    }

    /// Validates arity, normal forms and homogeneity of the stated degree.
    pub fn cochain(&self, components: Multilinear, degree: i64) -> Result<HochschildCochain> {
        let shape = self.shape();
        components.validate(shape).map_err(Error::Invalid)?;
        if components.max_arity() > self.a_max {
            return Err(Error::ArityOverflow { needed: components.max_arity(), bound: self.a_max });
        }
        for v in components.nullary.values().chain(components.terms.values()) {
            for (_, c) in v.iter() {
                self.base.check(c)?;
            }
        }
        let bad = components.degree_violations(shape, |k| degree + 1 - k as i64);
        if let Some(b) = bad.first() {
            return Err(Error::DegreeMismatch(format!("component {b} is not of reduced degree {degree}")));
        }
        Ok(HochschildCochain { components, degree: self.norm(degree) })
    }

    pub fn add(&self, a: &HochschildCochain, b: &HochschildCochain) -> Result<HochschildCochain> {
        if !a.is_zero() && !b.is_zero() && self.norm(a.degree) != self.norm(b.degree) {
            return Err(Error::DegreeMismatch(format!("cannot add degrees {} and {}", a.degree, b.degree)));
        }
        let degree = if a.is_zero() { b.degree } else { a.degree };
        Ok(HochschildCochain { components: a.components.add(&b.components), degree })
    }

    pub fn sub(&self, a: &HochschildCochain, b: &HochschildCochain) -> Result<HochschildCochain> {
        self.add(a, &b.neg())
    }

    /// `(η·ω)(a_k..a_1) = Σ (−1)^{(‖a_i‖+…+‖a_1‖)‖ω‖} η(a_k, …, ω(…), a_i, …, a_1)`.
    pub fn gerstenhaber(&self, eta: &HochschildCochain, omega: &HochschildCochain) -> Result<HochschildCochain> {
        let degree = self.norm(eta.degree + omega.degree);
        if eta.components.terms.is_empty() || omega.is_zero() {
            return Ok(HochschildCochain::zero(degree));
        }
        let needed = eta.max_arity() + omega.max_arity() - 1;
        if needed > self.a_max {
            return Err(Error::ArityOverflow { needed, bound: self.a_max });
        }
        let shape = self.shape();
        let mut by_ends: BTreeMap<(usize, usize), Vec<(&[Gen], &VectorB)>> = BTreeMap::new();
        for (x, v) in &omega.components.nullary {
            by_ends.entry((*x, *x)).or_default().push((&[], v));
        }
        for (k, v) in &omega.components.terms {
            by_ends.entry((k[0].src(), k[k.len() - 1].tgt())).or_default().push((k.as_slice(), v));
        }
        let odd_omega = parity(omega.degree);
        let mut out = Multilinear::new();
        for (ke, ve) in &eta.components.terms {
            let mut right = 0i64;
            for (i, g) in ke.iter().enumerate() {
                if let Some(list) = by_ends.get(&(g.src(), g.tgt())) {
                    let negate = odd_omega && parity(right);
                    for (kw, vw) in list {
                        let Some(c) = vw.get_ref(g.idx()) else { continue };
                        let mut value = ve.scale(&self.base, c);
                        if negate {
                            value = value.neg();
                        }
                        let mut key = Vec::with_capacity(ke.len() - 1 + kw.len());
                        key.extend_from_slice(&ke[..i]);
                        key.extend_from_slice(kw);
                        key.extend_from_slice(&ke[i + 1..]);
                        if key.is_empty() {
                            out.add_nullary(g.src(), &value);
                        } else {
                            out.add_term(key, &value);
                        }
                    }
                }
                right += shape.reduced(*g);
            }
        }
        Ok(HochschildCochain { components: out, degree })
    }

    /// `[η, ω] = η·ω − (−1)^{‖ω‖‖η‖} ω·η`.
    pub fn bracket(&self, eta: &HochschildCochain, omega: &HochschildCochain) -> Result<HochschildCochain> {
        let a = self.gerstenhaber(eta, omega)?;
        let b = self.gerstenhaber(omega, eta)?;
        let c = if parity(eta.degree * omega.degree) { a.components.add(&b.components) } else { a.components.sub(&b.components) };
        Ok(HochschildCochain { components: c, degree: self.norm(eta.degree + omega.degree) })
    }

    /// `dν = [μ_C, ν]`.
    pub fn differential(&self, nu: &HochschildCochain) -> Result<HochschildCochain> {
        self.bracket(&self.mu, nu)
    }

    /// `dν + ½[ν, ν]`.
    pub fn mc_defect(&self, nu: &HochschildCochain) -> Result<HochschildCochain> {
        if self.norm(nu.degree) != self.norm(1) {
            return Err(Error::DegreeMismatch(format!("Maurer-Cartan elements have reduced degree 1, got {}", nu.degree)));
        }
        let d = self.differential(nu)?;
        let b = self.bracket(nu, nu)?;
        let half = Q::new(1.into(), 2.into());
        Ok(HochschildCochain { components: d.components.add(&b.components.scale_q(&half)), degree: d.degree })
    }

    /// Time-one flow of the vector field `ν ↦ dφ + [ν, φ]`:
    /// `ν′ = e^{−ad_φ}(ν) + Σ_{n≥0} (−ad_φ)ⁿ(dφ)/(n+1)!`.
    pub fn gauge(&self, phi: &HochschildCochain, nu: &HochschildCochain) -> Result<HochschildCochain> {
        if self.norm(phi.degree) != 0 {
            return Err(Error::DegreeMismatch(format!("gauge generators have reduced degree 0, got {}", phi.degree)));
        }
        if !phi.madic_order().at_least(1) {
            return Err(Error::NotInfinitesimal("gauge generator".into()));
        }
        if phi.is_zero() {
            return Ok(nu.clone());
        }
        let steps = self.base.truncation() as i64 + 1;
        let mut result = nu.components.clone();
        let mut term = nu.clone();
        for n in 1..=steps {
            if term.is_zero() {
                break;
            }
            let next = self.bracket(phi, &term)?;
            term = next.scale_q(&Q::new((-1).into(), n.into()));
            result.add_assign(&term.components);
        }
        let mut term = self.differential(phi)?;
        result.add_assign(&term.components);
        for n in 1..=steps {
            if term.is_zero() {
                break;
            }
            let next = self.bracket(phi, &term)?;
            term = next.scale_q(&Q::new((-1).into(), (n + 1).into()));
            result.add_assign(&term.components);
        }
        Ok(HochschildCochain { components: result, degree: self.norm(1) })
    }

    /// `ν = μ_q − μ`, with the curvature as arity-0 component.
    pub fn deformation_to_mc(&self, d: &AInfDeformation) -> HochschildCochain {
        HochschildCochain { components: d.products().sub(&self.mu.components), degree: self.norm(1) }
    }

    pub fn mc_to_deformation(&self, nu: &HochschildCochain) -> Result<AInfDeformation> {
        if !nu.madic_order().at_least(1) {
            return Err(Error::NotInfinitesimal("Maurer-Cartan element".into()));
        }
        if !self.mc_defect(nu)?.is_zero() {
            return Err(Error::NotMaurerCartan);
        }
        self.mc_to_deformation_unchecked(nu)
    }

    /// Conversion without the Maurer-Cartan check; the result may violate the curved relations.
    pub fn mc_to_deformation_unchecked(&self, nu: &HochschildCochain) -> Result<AInfDeformation> {
        if self.norm(nu.degree) != self.norm(1) {
            return Err(Error::DegreeMismatch("deformations come from reduced degree 1 cochains".into()));
        }
        let products = self.mu.components.add(&nu.components);
        let k_max = self.category.k_max().max(products.max_arity());
        AInfDeformation::new(self.base.clone(), self.category.clone(), products, k_max)
    }

    /// Rational basis of arity-`k` cochains of reduced degree `degree`.
    pub fn cochain_basis(&self, k: usize, degree: i64) -> Vec<HochschildCochain> {
        let shape = self.shape();
        let mut out = Vec::new();
        let targets: Vec<(Vec<Gen>, usize, usize)> = if k == 0 {
            (0..shape.num_objects()).map(|x| (Vec::new(), x, x)).collect()
        } else {
            shape.tuples(k).into_iter().map(|t| {
                let (s, e) = (t[0].src(), t[t.len() - 1].tgt());
                (t, s, e)
            }).collect()
        };
        for (t, s, e) in targets {
            let din: i64 = t.iter().map(|&g| shape.reduced(g)).sum();
            for i in 0..shape.dim(s, e) {
                if self.norm(shape.hom(s, e).degree(i) - 1) == self.norm(degree + din) {
                    let mut m = Multilinear::new();
                    if t.is_empty() {
                        m.add_nullary(s, &VectorB::unit(i));
                    } else {
                        m.add_term(t.clone(), &VectorB::unit(i));
                    }
                    out.push(HochschildCochain { components: m, degree: self.norm(degree) });
                }
            }
        }
        out
    }

    /// Rank of `d` on rational arity-`k` cochains of the given degree.
    pub fn differential_rank(&self, k: usize, degree: i64) -> Result<usize> {
        let basis = self.cochain_basis(k, degree);
        let images: Vec<Multilinear> = basis.iter().map(|c| self.differential(c).map(|d| d.components)).collect::<Result<_>>()?;
        let mut coords: BTreeMap<(Option<Vec<Gen>>, usize, usize), usize> = BTreeMap::new();
        for m in &images {
            for (x, v) in &m.nullary {
                for (i, _) in v.iter() {
                    let n = coords.len();
                    coords.entry((None, *x, i)).or_insert(n);
                }
            }
            for (key, v) in &m.terms {
                for (i, _) in v.iter() {
                    let n = coords.len();
                    coords.entry((Some(key.clone()), 0, i)).or_insert(n);
                }
            }
        }
        let mut mat = QMatrix::zeros(coords.len(), images.len());
        for (j, m) in images.iter().enumerate() {
            for (x, v) in &m.nullary {
                for (i, c) in v.iter() {
                    mat.set(coords[&(None, *x, i)], j, c.constant_term());
                }
            }
            for (key, v) in &m.terms {
                for (i, c) in v.iter() {
                    mat.set(coords[&(Some(key.clone()), 0, i)], j, c.constant_term());
                }
            }
        }
        Ok(mat.rank())
    }
}
