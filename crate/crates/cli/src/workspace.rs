//! Loading documents into engine objects and writing them back.

use std::collections::BTreeMap;
use std::path::Path;
use std::sync::Arc;

use ainf_core::ainf::{AInfCategory, AInfDeformation, Gen, Multilinear, Shape, Structure};
use ainf_core::base::{parse_rational, BaseSpec, Coefficient, Monomial};
use ainf_core::graded::{GradedBasis, GradingMode, VectorB};
use ainf_core::twisted::{TwMatrix, TwistedComplex};

use crate::error::{CliError, CliResult};
use crate::schema::*;

/// Everything one document describes, validated.
#[derive(Clone, Debug)]
pub struct Workspace {
    pub name: String,
    pub base: Option<BaseSpec>,
    pub category: Arc<AInfCategory>,
    pub deformation: Option<AInfDeformation>,
    pub twisted: Vec<TwistedComplex>,
    pub uncurving: BTreeMap<usize, VectorB>,
}

impl Workspace {
    pub fn base(&self) -> CliResult<&BaseSpec> {
        self.base.as_ref().ok_or_else(|| CliError::Missing("this command needs a `base` section".into()))
    }

    /// The deformation, or the trivial one when only a base is given.
    pub fn deformation(&self) -> CliResult<AInfDeformation> {
        match &self.deformation {
            Some(d) => Ok(d.clone()),
            None => Ok(AInfDeformation::trivial(self.base()?.clone(), self.category.clone())),
        }
    }

    pub fn shape(&self) -> &Shape {
        self.category.shape()
    }
}

pub fn load_path(path: &Path) -> CliResult<Workspace> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io { path: path.display().to_string(), message: e.to_string() })?;
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("input");
    load_str(&text, stem)
}

pub fn load_str(text: &str, default_name: &str) -> CliResult<Workspace> {
    let doc: Document = serde_json::from_str(text).map_err(CliError::from_json)?;
    build(&doc, default_name)
}

fn invariant(e: ainf_core::Error) -> CliError {
    CliError::Invariant(e.to_string())
}

pub fn build(doc: &Document, default_name: &str) -> CliResult<Workspace> {
    let name = doc.name.clone().unwrap_or_else(|| default_name.to_string());
    let base = match &doc.base {
        Some(b) => {
            if b.relations.iter().any(|r| r.len() != b.vars) {
                return Err(CliError::schema("base.relations", format!("every relation needs {} exponents", b.vars)));
            }
            Some(BaseSpec::new(b.vars, b.truncation, &b.relations).map_err(invariant)?)
        }
        None => None,
    };
    let shape = Arc::new(build_shape(&doc.category)?);
    let resolver = Resolver::new(&shape);
    let cat = &doc.category;
    let mut products = Multilinear::new();
    for (n, p) in cat.products.iter().enumerate() {
        let field = format!("category.products[{n}]");
        let (key, v) = resolver.product(&field, p, None, true)?;
        products.add_term(key, &v);
    }
    let degrees = products.degree_violations(&shape, |k| 2 - k as i64);
    if let Some(v) = degrees.first() {
        return Err(CliError::Invariant(format!("product {v} has the wrong degree")));
    }
    let k_max = cat.arity_bound.unwrap_or(products.max_arity().max(1));
    let category = if cat.complete {
        AInfCategory::new(shape.clone(), products, k_max)
    } else {
        AInfCategory::truncated(shape.clone(), products, k_max)
    }
    .map_err(invariant)?;
    let category = Arc::new(category);

    let deformation = match &doc.deformation {
        Some(def) => {
            let base = base.as_ref().ok_or_else(|| CliError::schema("deformation", "a deformation needs a `base` section"))?;
            Some(build_deformation(&resolver, base, &category, def)?)
        }
        None => None,
    };

    let mut twisted = Vec::new();
    for (n, t) in doc.twisted.iter().enumerate() {
        let x = build_twisted(&resolver, base.as_ref(), &format!("twisted[{n}]"), t)?;
        match &deformation {
            Some(d) => x.validate(d),
            None => match &base {
                Some(b) => x.validate(&AInfDeformation::trivial(b.clone(), category.clone())),
                None => x.validate(category.as_ref()),
            },
        }
        .map_err(invariant)?;
        twisted.push(x);
    }

    let mut uncurving = BTreeMap::new();
    for (n, u) in doc.uncurving.iter().enumerate() {
        let field = format!("uncurving[{n}]");
        let base = base.as_ref().ok_or_else(|| CliError::schema(&field, "an uncurving element needs a `base` section"))?;
        let x = resolver.object(&format!("{field}.object"), &u.object)?;
        let v = resolver.vector(&field, &u.output, x, x, Some(base), false)?;
        let hom = shape.hom(x, x);
        if v.support().any(|i| !shape.mode().same(hom.degree(i), 1)) {
            return Err(CliError::Invariant(format!("uncurving element at {} must have degree 1", u.object)));
        }
        if !v.madic_order().at_least(1) {
            return Err(CliError::Invariant(format!("uncurving element at {} is not infinitesimal", u.object)));
        }
        if uncurving.insert(x, v).is_some() {
            return Err(CliError::schema(field, format!("object {} listed twice", u.object)));
        }
    }
    Ok(Workspace { name, base, category, deformation, twisted, uncurving })
}

fn build_shape(cat: &CategoryDoc) -> CliResult<Shape> {
    for (n, o) in cat.objects.iter().enumerate() {
        if o.is_empty() || o.contains(['@', ',']) {
            return Err(CliError::schema(format!("category.objects[{n}]"), "object names must be nonempty and avoid '@' and ','"));
        }
    }
    let index = |field: &str, o: &str| {
        cat.objects.iter().position(|x| x == o).ok_or_else(|| CliError::schema(field, format!("unknown object {o}")))
    };
    let mode = match cat.grading {
        GradingDoc::Z => GradingMode::Z,
        GradingDoc::Z2 => GradingMode::Z2,
    };
    let mut homs = BTreeMap::new();
    for (n, h) in cat.homs.iter().enumerate() {
        let field = format!("category.homs[{n}]");
        let s = index(&format!("{field}.source"), &h.source)?;
        let t = index(&format!("{field}.target"), &h.target)?;
        for (m, b) in h.basis.iter().enumerate() {
            if b.name.is_empty() || b.name.contains('@') {
                return Err(CliError::schema(format!("{field}.basis[{m}].name"), "basis names must be nonempty and avoid '@'"));
            }
        }
        let basis = GradedBasis::new(mode, h.basis.iter().map(|b| (b.name.clone(), b.degree)).collect())
            .map_err(|e| CliError::schema(format!("{field}.basis"), e.to_string()))?;
        if homs.insert((s, t), basis).is_some() {
            return Err(CliError::schema(field, format!("Hom({}, {}) listed twice", h.source, h.target)));
        }
    }
    let mut identities = vec![None; cat.objects.len()];
    for (o, name) in &cat.identities {
        let field = format!("category.identities.{o}");
        let x = index(&field, o)?;
        let i = homs
            .get(&(x, x))
            .and_then(|b| b.index_of(name))
            .ok_or_else(|| CliError::schema(&field, format!("no basis element {name} in End({o})")))?;
        identities[x] = Some(i);
    }
    Shape::new(mode, cat.objects.clone(), homs, identities).map_err(invariant)
}

fn build_deformation(r: &Resolver, base: &BaseSpec, category: &Arc<AInfCategory>, def: &DeformationDoc) -> CliResult<AInfDeformation> {
    let shape = category.shape();
    let mut extra = Multilinear::new();
    for (n, p) in def.products_q.iter().enumerate() {
        let field = format!("deformation.products_q[{n}]");
        let (key, v) = r.product(&field, p, Some(base), false)?;
        if !v.madic_order().at_least(1) {
            return Err(CliError::Invariant(format!("{field}: deformation terms must lie in the maximal ideal")));
        }
        extra.add_term(key, &v);
    }
    for (n, c) in def.curvature.iter().enumerate() {
        let field = format!("deformation.curvature[{n}]");
        let x = r.object(&format!("{field}.object"), &c.object)?;
        let v = r.vector(&field, &c.output, x, x, Some(base), false)?;
        if !v.madic_order().at_least(1) {
            return Err(CliError::Invariant(format!("curvature at {} is not infinitesimal", c.object)));
        }
        extra.add_nullary(x, &v);
    }
    let degrees = extra.degree_violations(shape, |k| 2 - k as i64);
    if let Some(v) = degrees.first() {
        return Err(CliError::Invariant(format!("deformation term {v} has the wrong degree")));
    }
    let k_max = def.arity_bound.unwrap_or(category.k_max().max(extra.max_arity()));
    let products = category.products().add(&extra);
    if def.complete {
        AInfDeformation::new(base.clone(), category.clone(), products, k_max)
    } else {
        AInfDeformation::truncated(base.clone(), category.clone(), products, k_max)
    }
    .map_err(invariant)
}

fn build_twisted(r: &Resolver, base: Option<&BaseSpec>, field: &str, t: &TwistedDoc) -> CliResult<TwistedComplex> {
    let mut summands = Vec::new();
    for (n, s) in t.summands.iter().enumerate() {
        summands.push((r.object(&format!("{field}.summands[{n}].object"), &s.object)?, s.shift));
    }
    let mut delta = TwMatrix::new();
    for (n, e) in t.delta.iter().enumerate() {
        let f = format!("{field}.delta[{n}]");
        if e.from >= summands.len() || e.to >= summands.len() {
            return Err(CliError::schema(f, "entry refers to a summand that does not exist"));
        }
        let v = r.vector(&f, &e.output, summands[e.from].0, summands[e.to].0, base, false)?;
        if !v.is_zero() && delta.insert((e.from, e.to), v).is_some() {
            return Err(CliError::schema(f, "entry listed twice"));
        }
    }
    Ok(TwistedComplex::new(t.name.clone(), summands, delta))
}

/// Turns basis references into generators. A reference is a basis name, or `name@S,T` when the
/// name alone is ambiguous.
struct Resolver<'a> {
    shape: &'a Shape,
}

impl<'a> Resolver<'a> {
    fn new(shape: &'a Shape) -> Self {
        Resolver { shape }
    }

    fn object(&self, field: &str, name: &str) -> CliResult<usize> {
        self.shape.object_index(name).ok_or_else(|| CliError::schema(field, format!("unknown object {name}")))
    }

    fn split<'b>(&self, field: &str, reference: &'b str) -> CliResult<(&'b str, Option<(usize, usize)>)> {
        match reference.split_once('@') {
            None => Ok((reference, None)),
            Some((name, objs)) => {
                let (s, t) = objs
                    .split_once(',')
                    .ok_or_else(|| CliError::schema(field, format!("malformed reference {reference}")))?;
                Ok((name, Some((self.object(field, s)?, self.object(field, t)?))))
            }
        }
    }

    fn candidates(&self, field: &str, reference: &str) -> CliResult<Vec<Gen>> {
        let (name, objs) = self.split(field, reference)?;
        let out: Vec<Gen> = self
            .shape
            .all_gens()
            .into_iter()
            .filter(|&g| self.shape.gen_name(g) == name && objs.is_none_or(|o| o == (g.src(), g.tgt())))
            .collect();
        if out.is_empty() {
            return Err(CliError::schema(field, format!("unknown basis element {reference}")));
        }
        Ok(out)
    }

    fn in_hom(&self, field: &str, reference: &str, s: usize, t: usize) -> CliResult<usize> {
        let (name, objs) = self.split(field, reference)?;
        if objs.is_some_and(|o| o != (s, t)) {
            return Err(CliError::schema(field, format!("{reference} does not lie in the expected hom space")));
        }
        self.shape.hom(s, t).index_of(name).ok_or_else(|| {
            CliError::schema(
                field,
                format!("unknown basis element {name} in Hom({}, {})", self.shape.object_name(s), self.shape.object_name(t)),
            )
        })
    }

    /// Written-order references to the unique composable path.
    fn inputs(&self, field: &str, written: &[String]) -> CliResult<Vec<Gen>> {
        let mut options = Vec::new();
        for (n, r) in written.iter().rev().enumerate() {
            options.push(self.candidates(&format!("{field}.inputs[{}]", written.len() - 1 - n), r)?);
        }
        let mut found = Vec::new();
        let mut cur = Vec::new();
        fn search(options: &[Vec<Gen>], cur: &mut Vec<Gen>, found: &mut Vec<Vec<Gen>>) {
            if found.len() > 1 {
                return;
            }
            if cur.len() == options.len() {
                found.push(cur.clone());
                return;
            }
            for &g in &options[cur.len()] {
                if cur.last().is_none_or(|p: &Gen| p.tgt == g.src) {
                    cur.push(g);
                    search(options, cur, found);
                    cur.pop();
                }
            }
        }
        search(&options, &mut cur, &mut found);
        match found.len() {
            0 => Err(CliError::schema(field, "inputs are not composable")),
            1 => Ok(found.pop().unwrap()),
            _ => Err(CliError::schema(field, "inputs are ambiguous; qualify names as name@S,T")),
        }
    }

    fn coefficient(&self, field: &str, c: &CoeffDoc, base: Option<&BaseSpec>, rational: bool) -> CliResult<Coefficient> {
        let q = |s: &str| parse_rational(s).ok_or_else(|| CliError::schema(field, format!("not a rational number: {s:?}")));
        let out = match c {
            CoeffDoc::Rational(s) => Coefficient::constant(q(s)?),
            CoeffDoc::Polynomial(terms) => {
                let mut out = Vec::new();
                for t in terms {
                    if t.exponents.iter().all(|&e| e == 0) {
                        out.push((Monomial::from_exponents(&t.exponents), q(&t.coeff)?));
                        continue;
                    }
                    let base = base.ok_or_else(|| CliError::schema(field, "polynomial coefficients need a `base` section"))?;
                    if t.exponents.len() != base.num_vars() {
                        return Err(CliError::schema(field, format!("exponent vectors need {} entries", base.num_vars())));
                    }
                    out.push((Monomial::from_exponents(&t.exponents), q(&t.coeff)?));
                }
                Coefficient::from_terms(out)
            }
        };
        if rational && out.as_constant().is_none() {
            return Err(CliError::Invariant(format!("{field}: category coefficients must be rational")));
        }
        if let Some(b) = base {
            b.check(&out).map_err(|e| CliError::Invariant(format!("{field}: {e}")))?;
        }
        Ok(out)
    }

    fn vector(&self, field: &str, terms: &[TermDoc], s: usize, t: usize, base: Option<&BaseSpec>, rational: bool) -> CliResult<VectorB> {
        let mut v = VectorB::zero();
        for (n, term) in terms.iter().enumerate() {
            let f = format!("{field}.output[{n}]");
            let i = self.in_hom(&f, &term.name, s, t)?;
            v.add_at(i, &self.coefficient(&f, &term.coeff, base, rational)?);
        }
        Ok(v)
    }

    fn product(&self, field: &str, p: &ProductDoc, base: Option<&BaseSpec>, rational: bool) -> CliResult<(Vec<Gen>, VectorB)> {
        if p.arity != p.inputs.len() {
            return Err(CliError::schema(field, format!("arity {} but {} inputs", p.arity, p.inputs.len())));
        }
        if p.arity == 0 {
            return Err(CliError::schema(field, "arity 0 belongs in deformation.curvature"));
        }
        let key = self.inputs(field, &p.inputs)?;
        let v = self.vector(field, &p.output, key[0].src(), key[key.len() - 1].tgt(), base, rational)?;
        Ok((key, v))
    }
}

/// Basis labels that stay unambiguous when read back.
pub struct Labels<'a> {
    shape: &'a Shape,
    counts: BTreeMap<&'a str, usize>,
}

impl<'a> Labels<'a> {
    pub fn new(shape: &'a Shape) -> Self {
        let mut counts = BTreeMap::new();
        for g in shape.all_gens() {
            *counts.entry(shape.gen_name(g)).or_insert(0) += 1;
        }
        Labels { shape, counts }
    }

    pub fn label(&self, g: Gen) -> String {
        let name = self.shape.gen_name(g);
        if self.counts[name] > 1 {
            format!("{name}@{},{}", self.shape.object_name(g.src()), self.shape.object_name(g.tgt()))
        } else {
            name.to_string()
        }
    }

    pub fn terms(&self, s: usize, t: usize, v: &VectorB, nvars: usize) -> Vec<TermDoc> {
        v.iter()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| TermDoc { coeff: coeff_doc(c, nvars), name: self.shape.hom(s, t).name(i).to_string() })
            .collect()
    }
}

pub fn coeff_doc(c: &Coefficient, nvars: usize) -> CoeffDoc {
    match c.as_constant() {
        Some(q) => CoeffDoc::Rational(q.to_string()),
        None => CoeffDoc::Polynomial(
            c.terms().map(|(m, q)| MonomialDoc { coeff: q.to_string(), exponents: m.exponents(nvars) }).collect(),
        ),
    }
}

pub fn base_doc(b: &BaseSpec) -> BaseDoc {
    BaseDoc {
        vars: b.num_vars(),
        truncation: b.truncation(),
        relations: b.relations().iter().map(|m| m.exponents(b.num_vars())).collect(),
    }
}

fn products_doc(labels: &Labels, table: &Multilinear, nvars: usize) -> Vec<ProductDoc> {
    table
        .terms
        .iter()
        .filter(|(_, v)| !v.is_zero())
        .map(|(k, v)| ProductDoc {
            arity: k.len(),
            inputs: k.iter().rev().map(|&g| labels.label(g)).collect(),
            output: labels.terms(k[0].src(), k[k.len() - 1].tgt(), v, nvars),
        })
        .collect()
}

pub fn category_doc(c: &AInfCategory) -> CategoryDoc {
    let shape = c.shape();
    let labels = Labels::new(shape);
    let homs = shape
        .hom_pairs()
        .into_iter()
        .map(|(s, t)| HomDoc {
            source: shape.object_name(s).to_string(),
            target: shape.object_name(t).to_string(),
            basis: shape.hom(s, t).elements().iter().map(|e| BasisDoc { name: e.name.clone(), degree: e.degree }).collect(),
        })
        .collect();
    let identities = (0..shape.num_objects())
        .filter_map(|x| shape.identity_gen(x).map(|g| (shape.object_name(x).to_string(), shape.gen_name(g).to_string())))
        .collect();
    let default_bound = c.products().max_arity().max(1);
    CategoryDoc {
        grading: match shape.mode() {
            GradingMode::Z => GradingDoc::Z,
            GradingMode::Z2 => GradingDoc::Z2,
        },
        objects: shape.objects().to_vec(),
        homs,
        identities,
        products: products_doc(&labels, c.products(), 0),
        arity_bound: (c.k_max() != default_bound || !c.is_complete()).then_some(c.k_max()),
        complete: c.is_complete(),
    }
}

/// The part of the products beyond the reference category, and the curvature.
pub fn deformation_doc(d: &AInfDeformation) -> DeformationDoc {
    let shape = d.shape();
    let labels = Labels::new(shape);
    let nvars = d.base().num_vars();
    let extra = d.products().sub(d.reference().products());
    let curvature = extra
        .nullary
        .iter()
        .filter(|(_, v)| !v.is_zero())
        .map(|(x, v)| ObjectVectorDoc { object: shape.object_name(*x).to_string(), output: labels.terms(*x, *x, v, nvars) })
        .collect();
    let default_bound = d.reference().k_max().max(extra.max_arity());
    DeformationDoc {
        products_q: products_doc(&labels, &extra, nvars),
        curvature,
        arity_bound: (d.k_max() != default_bound || !d.is_complete()).then_some(d.k_max()),
        complete: d.is_complete(),
    }
}

pub fn twisted_doc(shape: &Shape, x: &TwistedComplex, nvars: usize) -> TwistedDoc {
    let labels = Labels::new(shape);
    TwistedDoc {
        name: x.name.clone(),
        summands: x.summands.iter().map(|&(o, s)| SummandDoc { object: shape.object_name(o).to_string(), shift: s }).collect(),
        delta: x
            .delta
            .iter()
            .filter(|(_, v)| !v.is_zero())
            .map(|(&(i, j), v)| EntryDoc { from: i, to: j, output: labels.terms(x.summands[i].0, x.summands[j].0, v, nvars) })
            .collect(),
    }
}

pub fn object_vectors(shape: &Shape, r: &BTreeMap<usize, VectorB>, nvars: usize) -> Vec<ObjectVectorDoc> {
    let labels = Labels::new(shape);
    r.iter()
        .filter(|(_, v)| !v.is_zero())
        .map(|(x, v)| ObjectVectorDoc { object: shape.object_name(*x).to_string(), output: labels.terms(*x, *x, v, nvars) })
        .collect()
}

pub fn emit(ws: &Workspace) -> Document {
    let nvars = ws.base.as_ref().map_or(0, |b| b.num_vars());
    Document {
        name: Some(ws.name.clone()),
        base: ws.base.as_ref().map(base_doc),
        category: category_doc(&ws.category),
        deformation: ws.deformation.as_ref().map(deformation_doc),
        twisted: ws.twisted.iter().map(|x| twisted_doc(ws.shape(), x, nvars)).collect(),
        uncurving: object_vectors(ws.shape(), &ws.uncurving, nvars),
    }
}

pub fn to_json<T: serde::Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}

/// A document with only the given pieces, for emitted results.
pub fn document(name: &str, base: Option<&BaseSpec>, category: &AInfCategory, deformation: Option<&AInfDeformation>) -> Document {
    Document {
        name: Some(name.to_string()),
        base: base.map(base_doc),
        category: category_doc(category),
        deformation: deformation.map(deformation_doc),
        twisted: Vec::new(),
        uncurving: Vec::new(),
    }
}

pub fn write_file(path: &Path, contents: &str) -> CliResult<()> {
    std::fs::write(path, contents).map_err(|e| CliError::Io { path: path.display().to_string(), message: e.to_string() })
}
