#![allow(dead_code)]

use std::collections::BTreeMap;
use std::sync::Arc;

use ainf_core::ainf::{AInfCategory, AInfDeformation, Gen, Multilinear, Structure};
use ainf_core::base::{q, BaseSpec, Coefficient, Monomial};
use ainf_core::graded::VectorB;
use ainf_core::hochschild::{Hochschild, HochschildCochain};
use ainf_core::instances::*;
use ainf_core::kadeishvili::TreeShape;
use ainf_core::twisted::uncurve;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn one_var(n: u32) -> BaseSpec {
    BaseSpec::new(1, n, &[]).unwrap()
}

/// A random element of the maximal ideal with small integer coefficients.
pub fn random_infinitesimal(rng: &mut impl Rng, base: &BaseSpec) -> Coefficient {
    let mut terms = Vec::new();
    for m in base.normal_monomials() {
        if m.degree() > 0 && rng.gen_bool(0.5) {
            let c = rng.gen_range(-3i64..=3);
            if c != 0 {
                terms.push((m, q(c)));
            }
        }
    }
    if terms.is_empty() {
        terms.push((Monomial::var(rng.gen_range(0..base.num_vars())), q(1)));
    }
    Coefficient::from_terms(terms)
}

/// A random coefficient with nonzero constant term possible.
pub fn random_coefficient(rng: &mut impl Rng, base: &BaseSpec) -> Coefficient {
    let mut c = random_infinitesimal(rng, base);
    let k = rng.gen_range(-2i64..=2);
    c += &Coefficient::int(k);
    c
}

/// A random infinitesimal degree-1 endomorphism at every object that has one.
pub fn random_uncurving(rng: &mut impl Rng, d: &AInfDeformation) -> BTreeMap<usize, VectorB> {
    let shape = d.shape();
    let mut out = BTreeMap::new();
    for x in 0..shape.num_objects() {
        let hom = shape.hom(x, x);
        let odd: Vec<usize> = (0..hom.dim()).filter(|&i| shape.mode().same(hom.degree(i), 1)).collect();
        let mut v = VectorB::zero();
        for &i in &odd {
            if rng.gen_bool(0.6) {
                v.add_at(i, &random_infinitesimal(rng, d.base()));
            }
        }
        if v.is_zero() {
            if let Some(&i) = odd.choose(rng) {
                v.add_at(i, &d.base().var(0));
            }
        }
        if !v.is_zero() {
            out.insert(x, v);
        }
    }
    out
}

/// A random gauge generator of reduced degree 0 with arity-1 components and, optionally,
/// a few arity-2 components.
pub fn random_gauge_generator(rng: &mut impl Rng, h: &Hochschild, arity_two: usize) -> HochschildCochain {
    let shape = h.shape().clone();
    let base = h.base().clone();
    let mut m = Multilinear::new();
    for g in shape.all_gens() {
        if shape.is_identity(g) {
            continue;
        }
        for i in 0..shape.dim(g.src(), g.tgt()) {
            if shape.mode().same(shape.hom(g.src(), g.tgt()).degree(i), shape.degree(g)) && rng.gen_bool(0.3) {
                m.add_term(vec![g], &VectorB::single(i, random_infinitesimal(rng, &base)));
            }
        }
    }
    let pairs: Vec<Vec<Gen>> = shape.tuples(2).into_iter().filter(|t| t.iter().all(|&g| !shape.is_identity(g))).collect();
    let mut added = 0;
    for _ in 0..50 {
        if added >= arity_two || pairs.is_empty() {
            break;
        }
        let t = pairs.choose(rng).unwrap();
        let (s, e) = (t[0].src(), t[1].tgt());
        let deg = shape.degree(t[0]) + shape.degree(t[1]) - 1;
        let targets: Vec<usize> = (0..shape.dim(s, e)).filter(|&i| shape.mode().same(shape.hom(s, e).degree(i), deg)).collect();
        if let Some(&i) = targets.choose(rng) {
            m.add_term(t.clone(), &VectorB::single(i, random_infinitesimal(rng, &base)));
            added += 1;
        }
    }
    h.cochain(m, 0).expect("valid gauge generator")
}

/// One corpus entry: a valid deformation and the curved deformation obtained from it by
/// uncurving with `gauge`.
pub struct Case {
    pub label: String,
    pub classical: Arc<AInfCategory>,
    pub source: AInfDeformation,
    pub gauge: BTreeMap<usize, VectorB>,
    pub curved: AInfDeformation,
}

/// Randomized valid curved deformations, cycling through truncation orders 2, 4 and 8 and the
/// base instances `massey(1)` (with optional central curvature) and `exact_pair`.
pub fn corpus(count: usize, seed: u64) -> Vec<Case> {
    let mut rng = rng(seed);
    let mut out = Vec::with_capacity(count);
    for k in 0..count {
        let n = [2, 4, 8][k % 3];
        let base = one_var(n);
        let kind = (k / 3) % 2;
        let (start, label) = if kind == 0 {
            let c = massey(1);
            let mut table = c.products().clone();
            if rng.gen_bool(0.5) {
                let w = c.shape().hom(0, 0).index_of("w").unwrap();
                table.add_nullary(0, &VectorB::single(w, random_infinitesimal(&mut rng, &base)));
            }
            (AInfDeformation::new(base.clone(), c, table, 2).unwrap(), "massey")
        } else {
            (exact_pair_deformed(&base), "exact pair")
        };
        let h = Hochschild::new(start.reference().clone(), base.clone(), 12).unwrap();
        let arity_two = if n <= 4 { 2 } else { 0 };
        let phi = random_gauge_generator(&mut rng, &h, arity_two);
        let nu = h.gauge(&phi, &h.deformation_to_mc(&start)).unwrap();
        let source = h.mc_to_deformation_unchecked(&nu).unwrap();
        let gauge = random_uncurving(&mut rng, &source);
        let curved = uncurve(&source, &gauge).unwrap();
        out.push(Case {
            label: format!("{label} N={n} #{k}"),
            classical: start.reference().clone(),
            source,
            gauge,
            curved,
        });
    }
    out
}

/// Random combination of rational basis cochains of the given reduced degree and arities.
pub fn random_cochain(rng: &mut impl Rng, h: &Hochschild, degree: i64, arities: &[usize], infinitesimal: bool, density: f64) -> HochschildCochain {
    let mut m = Multilinear::new();
    for &k in arities {
        for b in h.cochain_basis(k, degree) {
            if rng.gen_bool(density) {
                let c = if infinitesimal { random_infinitesimal(rng, h.base()) } else { random_coefficient(rng, h.base()) };
                m.add_assign(&b.components.scale(h.base(), &c));
            }
        }
    }
    h.cochain(m, degree).expect("random cochain")
}

/// Trees with `n` leaves, found by closing the corolla under grouping a contiguous run of
/// children of one node into a new node.
pub fn brute_force_trees(n: usize) -> Vec<TreeShape> {
    use std::collections::HashSet;
    fn groupings(t: &TreeShape) -> Vec<TreeShape> {
        let TreeShape::Node(cs) = t else { return Vec::new() };
        let mut out = Vec::new();
        let k = cs.len();
        for s in 0..k {
            for e in s + 2..=k {
                if e - s == k {
                    continue;
                }
                let mut v = cs[..s].to_vec();
                v.push(TreeShape::Node(cs[s..e].to_vec()));
                v.extend_from_slice(&cs[e..]);
                out.push(TreeShape::Node(v));
            }
        }
        for (i, c) in cs.iter().enumerate() {
            for g in groupings(c) {
                let mut v = cs.clone();
                v[i] = g;
                out.push(TreeShape::Node(v));
            }
        }
        out
    }
    let mut seen: HashSet<TreeShape> = HashSet::new();
    let mut todo = vec![TreeShape::corolla(n)];
    while let Some(t) = todo.pop() {
        if !seen.contains(&t) {
            todo.extend(groupings(&t));
            seen.insert(t);
        }
    }
    seen.into_iter().collect()
}

pub fn brute_force_tree_count(n: usize) -> usize {
    brute_force_trees(n).len()
}

/// Right-hand side of the associator relation: all ways of inserting `b` and `c` into distinct
/// inputs of `a`, with signs from the reduced degrees of the final inputs behind each insertion.
pub fn associator_oracle(h: &Hochschild, a: &HochschildCochain, b: &HochschildCochain, c: &HochschildCochain) -> Multilinear {
    let shape = h.shape();
    let base = h.base();
    let blocks = |w: &HochschildCochain| -> Vec<(Vec<Gen>, usize, usize, VectorB)> {
        let mut out: Vec<(Vec<Gen>, usize, usize, VectorB)> =
            w.components.nullary.iter().map(|(x, v)| (Vec::new(), *x, *x, v.clone())).collect();
        for (k, v) in &w.components.terms {
            out.push((k.clone(), k[0].src(), k[k.len() - 1].tgt(), v.clone()));
        }
        out
    };
    let (bb, cb) = (blocks(b), blocks(c));
    let odd = |n: i64| n.rem_euclid(2) == 1;
    let mut out = Multilinear::new();
    for (ka, va) in &a.components.terms {
        for i in 0..ka.len() {
            for j in 0..ka.len() {
                if i == j {
                    continue;
                }
                for (kb, sb, tb, vb) in &bb {
                    if (ka[i].src(), ka[i].tgt()) != (*sb, *tb) {
                        continue;
                    }
                    let Some(cbv) = vb.get_ref(ka[i].idx()) else { continue };
                    for (kc, sc, tc, vc) in &cb {
                        if (ka[j].src(), ka[j].tgt()) != (*sc, *tc) {
                            continue;
                        }
                        let Some(ccv) = vc.get_ref(ka[j].idx()) else { continue };
                        let mut key = Vec::new();
                        let (mut before_b, mut before_c) = (0i64, 0i64);
                        for (p, g) in ka.iter().enumerate() {
                            let run: Vec<Gen> = if p == i {
                                before_b = key.iter().map(|&x| shape.reduced(x)).sum();
                                kb.clone()
                            } else if p == j {
                                before_c = key.iter().map(|&x| shape.reduced(x)).sum();
                                kc.clone()
                            } else {
                                vec![*g]
                            };
                            key.extend(run);
                        }
                        let mut exponent = b.degree * before_b + c.degree * before_c;
                        if j < i {
                            exponent += b.degree * c.degree;
                        }
                        let mut value = va.scale(base, &base.mul(cbv, ccv));
                        if odd(exponent) {
                            value = value.neg();
                        }
                        if key.is_empty() {
                            out.add_nullary(ka[0].src(), &value);
                        } else {
                            out.add_term(key, &value);
                        }
                    }
                }
            }
        }
    }
    out
}

/// Whether the order-one slice of the curvature at `x` lies in the image of `μ¹`, by a rational
/// linear solve per degree-one monomial.
pub fn first_order_solvable(d: &AInfDeformation, x: usize) -> bool {
    use ainf_core::splitting::mu1_matrix;
    let m = mu1_matrix(d.reference().as_ref(), x, x);
    let n = d.shape().dim(x, x);
    d.curvature(x).slice(1).by_monomial(n).values().all(|part| m.solve(part).is_some())
}
