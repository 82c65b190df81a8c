//! Kadeishvili trees and classical minimal models.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;

use crate::ainf::{AInfCategory, Gen, Morphism, Multilinear, Products, Shape, Structure};
use crate::error::{Error, Result};
use crate::functor::DeformedFunctor;
use crate::graded::VectorB;
use crate::splitting::HomologicalSplitting;

/// A rooted planar tree; children are listed in path order (first child takes the first inputs).
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum TreeShape {
    Leaf,
    Node(Vec<TreeShape>),
}

impl TreeShape {
    pub fn corolla(n: usize) -> TreeShape {
        TreeShape::Node(vec![TreeShape::Leaf; n])
    }

    pub fn leaves(&self) -> usize {
        match self {
            TreeShape::Leaf => 1,
            TreeShape::Node(cs) => cs.iter().map(|c| c.leaves()).sum(),
        }
    }

    /// Nodes that are neither leaves nor the root.
    pub fn internal_nodes(&self) -> usize {
        fn non_leaf(t: &TreeShape) -> usize {
            match t {
                TreeShape::Leaf => 0,
                TreeShape::Node(cs) => 1 + cs.iter().map(non_leaf).sum::<usize>(),
            }
        }
        non_leaf(self).saturating_sub(1)
    }

    /// `(−1)^{N_T}` as a boolean: true means negative.
    pub fn sign(&self) -> bool {
        self.internal_nodes() % 2 == 1
    }

    pub fn is_valid(&self) -> bool {
        match self {
            TreeShape::Leaf => true,
            TreeShape::Node(cs) => cs.len() >= 2 && cs.iter().all(|c| c.is_valid()),
        }
    }
}

/// Written order, leaves as `*`: the corolla on three leaves is `(* * *)`.
impl fmt::Display for TreeShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TreeShape::Leaf => f.write_str("*"),
            TreeShape::Node(cs) => {
                f.write_str("(")?;
                for (i, c) in cs.iter().rev().enumerate() {
                    if i > 0 {
                        f.write_str(" ")?;
                    }
                    write!(f, "{c}")?;
                }
                f.write_str(")")
            }
        }
    }
}

/// Compositions of `n` into at least `min_parts` positive parts, lexicographically.
pub fn compositions(n: usize, min_parts: usize) -> Vec<Vec<usize>> {
    fn rec(left: usize, cur: &mut Vec<usize>, min_parts: usize, out: &mut Vec<Vec<usize>>) {
        if left == 0 {
            if cur.len() >= min_parts {
                out.push(cur.clone());
            }
            return;
        }
        for p in 1..=left {
            cur.push(p);
            rec(left - p, cur, min_parts, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, &mut Vec::new(), min_parts, &mut out);
    out
}

/// All tree shapes with `n ≥ 2` leaves whose non-leaf nodes have at least two children.
pub fn enumerate_trees(n: usize) -> Result<Vec<TreeShape>> {
    if n < 2 {
        return Err(Error::Invalid(format!("tree shapes need at least 2 leaves, got {n}")));
    }
    let mut memo: HashMap<usize, Vec<TreeShape>> = HashMap::new();
    Ok(trees_memo(n, &mut memo))
}

fn trees_memo(n: usize, memo: &mut HashMap<usize, Vec<TreeShape>>) -> Vec<TreeShape> {
    if let Some(v) = memo.get(&n) {
        return v.clone();
    }
    let mut out = Vec::new();
    for comp in compositions(n, 2) {
        let options: Vec<Vec<TreeShape>> =
            comp.iter().map(|&p| if p == 1 { vec![TreeShape::Leaf] } else { trees_memo(p, memo) }).collect();
        let mut cur = Vec::with_capacity(comp.len());
        product(&options, &mut cur, &mut out);
    }
    memo.insert(n, out.clone());
    out
}

fn product(options: &[Vec<TreeShape>], cur: &mut Vec<TreeShape>, out: &mut Vec<TreeShape>) {
    if cur.len() == options.len() {
        out.push(TreeShape::Node(cur.clone()));
        return;
    }
    for t in &options[cur.len()] {
        cur.push(t.clone());
        product(options, cur, out);
        cur.pop();
    }
}

/// Number of tree shapes with `n` leaves, by the composition recursion without building trees.
pub fn count_trees(n: usize) -> u128 {
    let mut c = vec![0u128; n.max(1) + 1];
    c[1] = 1;
    for m in 2..=n {
        c[m] = compositions(m, 2).iter().map(|comp| comp.iter().map(|&p| c[p]).product::<u128>()).sum();
    }
    c[n]
}

/// Evaluates a tree on inputs in path order: `μ` at every node, then `internal` on the results of
/// non-root nodes and `root` on the result of the root.
pub fn evaluate_tree<S: Structure + ?Sized>(
    t: &TreeShape,
    inputs: &[Morphism],
    c: &S,
    internal: &dyn Fn(&Morphism) -> VectorB,
    root: &dyn Fn(&Morphism) -> VectorB,
) -> Result<VectorB> {
    if t.leaves() != inputs.len() || !t.is_valid() || matches!(t, TreeShape::Leaf) {
        return Err(Error::Invalid("tree shape does not match the inputs".into()));
    }
    for w in inputs.windows(2) {
        if w[0].tgt != w[1].src {
            return Err(Error::NotComposable("tree inputs are not composable".into()));
        }
    }
    fn node<S: Structure + ?Sized>(
        t: &TreeShape,
        inputs: &[Morphism],
        c: &S,
        op: &dyn Fn(&Morphism) -> VectorB,
        internal: &dyn Fn(&Morphism) -> VectorB,
    ) -> Result<Morphism> {
        match t {
            TreeShape::Leaf => Ok(inputs[0].clone()),
            TreeShape::Node(cs) => {
                if cs.len() > c.k_max() {
                    if c.complete() {
                        return Ok(Morphism::new(inputs[0].src, inputs[inputs.len() - 1].tgt, VectorB::zero()));
                    }
                    return Err(Error::ArityExceeded { arity: cs.len(), bound: c.k_max() });
                }
                let mut args = Vec::with_capacity(cs.len());
                let mut at = 0;
                for child in cs {
                    let n = child.leaves();
                    args.push(node(child, &inputs[at..at + n], c, internal, internal)?);
                    at += n;
                }
                let m = Morphism::new(inputs[0].src, inputs[inputs.len() - 1].tgt, c.eval(&args));
                Ok(Morphism::new(m.src, m.tgt, op(&m)))
            }
        }
    }
    Ok(node(t, inputs, c, root, internal)?.value)
}

/// `Res(T, h_1, …, h_n)`: internal nodes `hμ`, root `πμ`.
pub fn evaluate_pi_tree(t: &TreeShape, inputs: &[Morphism], sp: &HomologicalSplitting, c: &AInfCategory) -> Result<VectorB> {
    let h = |m: &Morphism| sp.apply_h(m).value;
    let pi = |m: &Morphism| sp.apply_pi(m).value;
    evaluate_tree(t, inputs, c, &h, &pi)
}

/// One tree's signed contribution to a minimal-model product.
#[derive(Clone, Debug)]
pub struct TreeContribution {
    pub shape: TreeShape,
    pub negative: bool,
    pub value: VectorB,
}

/// Per-tree terms of `μ_HC^n` on the given inputs, in enumeration order.
pub fn tree_contributions(inputs: &[Morphism], sp: &HomologicalSplitting, c: &AInfCategory) -> Result<Vec<TreeContribution>> {
    enumerate_trees(inputs.len())?
        .into_iter()
        .map(|t| {
            let value = evaluate_pi_tree(&t, inputs, sp, c)?;
            Ok(TreeContribution { negative: t.sign(), shape: t, value })
        })
        .collect()
}

/// Memoized tree sums. For every tuple of generators of the small shape, `lambda` is
/// `Σ μ^m(S(p_1), …, S(p_m))` over cuts into `m ≥ 2` parts, with `S` the input itself on single
/// generators and `−h(λ)` on longer parts; `S` on a tuple is the higher functor component.
pub struct TreeSums {
    pub lambda: HashMap<Vec<Gen>, Morphism>,
    pub higher: HashMap<Vec<Gen>, Morphism>,
}

impl TreeSums {
    pub fn compute<S: Structure + ?Sized>(
        c: &S,
        small: &Shape,
        include: &(dyn Fn(Gen) -> Morphism + Sync),
        h: &(dyn Fn(&Morphism) -> VectorB + Sync),
        bound: usize,
    ) -> TreeSums {
        let mut lambda = HashMap::new();
        let mut higher: HashMap<Vec<Gen>, Morphism> = HashMap::new();
        let singles: HashMap<Gen, Morphism> = small.all_gens().into_iter().map(|g| (g, include(g))).collect();
        let max_parts = if c.complete() { c.table().max_arity().min(c.k_max()) } else { c.k_max() };
        for len in 2..=bound {
            let tuples = small.tuples(len);
            let results: Vec<(Vec<Gen>, VectorB, VectorB)> = tuples
                .into_par_iter()
                .filter_map(|t| {
                    let mut acc = VectorB::zero();
                    let mut parts = Vec::new();
                    cuts(c, &t, 0, max_parts, &singles, &higher, &mut parts, &mut acc);
                    if acc.is_zero() {
                        return None;
                    }
                    let (s, e) = (t[0].src(), t[t.len() - 1].tgt());
                    let f = h(&Morphism::new(s, e, acc.clone())).neg();
                    Some((t, acc, f))
                })
                .collect();
            for (t, l, f) in results {
                let (s, e) = (t[0].src(), t[t.len() - 1].tgt());
                if !f.is_zero() {
                    higher.insert(t.clone(), Morphism::new(s, e, f));
                }
                lambda.insert(t, Morphism::new(s, e, l));
            }
        }
        TreeSums { lambda, higher }
    }
}

#[allow(clippy::too_many_arguments)]
fn cuts<S: Structure + ?Sized>(
    c: &S,
    t: &[Gen],
    pos: usize,
    max_parts: usize,
    singles: &HashMap<Gen, Morphism>,
    higher: &HashMap<Vec<Gen>, Morphism>,
    parts: &mut Vec<Morphism>,
    acc: &mut VectorB,
) {
    if pos == t.len() {
        if parts.len() >= 2 {
            acc.add_assign(&c.eval(parts));
        }
        return;
    }
    if parts.len() >= max_parts {
        return;
    }
    for end in pos + 1..=t.len() {
        if pos == 0 && end == t.len() {
            continue;
        }
        let part = if end == pos + 1 { singles.get(&t[pos]) } else { higher.get(&t[pos..end]) };
        let Some(m) = part else { continue };
        if m.value.is_zero() {
            continue;
        }
        parts.push(m.clone());
        cuts(c, t, end, max_parts, singles, higher, parts, acc);
        parts.pop();
    }
}

/// The classical minimal model on `H` with products up to arity `bound`, and the functor
/// `F: HC → C` with `F¹` the inclusion and `F^{n≥2} = −hλ`.
pub fn minimal_model(c: &AInfCategory, sp: &HomologicalSplitting, bound: usize) -> Result<(AInfCategory, DeformedFunctor)> {
    if bound < 2 {
        return Err(Error::Invalid("minimal models need a bound of at least 2".into()));
    }
    let hc_shape = sp.hc_shape().clone();
    let include = |g: Gen| sp.include(g);
    let h = |m: &Morphism| sp.apply_h(m).value;
    let sums = TreeSums::compute(c, &hc_shape, &include, &h, bound);
    let mut products = Multilinear::new();
    let mut components = Multilinear::new();
    for g in hc_shape.all_gens() {
        let inc = include(g);
        let mu1 = c.eval(&[inc.clone()]);
        products.add_term(vec![g], &sp.pi_coordinates(g.src(), g.tgt(), &mu1));
        components.add_term(vec![g], &inc.value);
    }
    for (t, l) in &sums.lambda {
        products.add_term(t.clone(), &sp.pi_coordinates(l.src, l.tgt, &l.value));
    }
    for (t, f) in &sums.higher {
        components.add_term(t.clone(), &f.value);
    }
    let hc = AInfCategory::truncated(hc_shape, products, bound)?;
    let functor = DeformedFunctor::new(
        Arc::new(Products::of(&hc)),
        Arc::new(Products::of(c)),
        (0..c.shape().num_objects()).collect(),
        components,
        bound,
        false,
    )?;
    Ok((hc, functor))
}
