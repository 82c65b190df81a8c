//! Small shipped instances used by the tests, the acceptance suite and the CLI examples.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::ainf::{dg_category, AInfCategory, AInfDeformation, Gen, Multilinear, Shape, Structure};
use crate::base::{q, BaseSpec, Coefficient, Q};
use crate::error::Result;
use crate::graded::{GradedBasis, GradingMode, VectorB};

/// One term `c * name` of a linear combination.
pub type Term<'a> = (i64, &'a str);

/// A dg algebra on one object `X` given by names: `products` lists `(a, b, a·b)`,
/// `differential` lists `(a, da)`. Unit products are implicit.
pub fn dg_algebra(
    mode: GradingMode,
    basis: &[(&str, i64)],
    unit: &str,
    products: &[(&str, &str, &[Term])],
    differential: &[(&str, &[Term])],
) -> Result<AInfCategory> {
    let b = GradedBasis::new(mode, basis.iter().map(|(n, d)| (n.to_string(), *d)).collect())?;
    let idx = |n: &str| b.index_of(n).unwrap_or_else(|| panic!("unknown basis element {n}"));
    let unit_idx = idx(unit);
    let g = |n: &str| Gen::new(0, 0, idx(n));
    let lin = |ts: &[Term]| -> VectorB {
        let mut v = VectorB::zero();
        for (c, n) in ts {
            v.add_at(idx(n), &Coefficient::int(*c));
        }
        v
    };
    let compose: Vec<(Gen, Gen, VectorB)> = products.iter().map(|(a, bb, r)| (g(a), g(bb), lin(r))).collect();
    let diff: Vec<(Gen, VectorB)> = differential.iter().map(|(a, r)| (g(a), lin(r))).collect();
    let mut homs = BTreeMap::new();
    homs.insert((0, 0), b.clone());
    let shape = Shape::new(mode, vec!["X".into()], homs, vec![Some(unit_idx)])?;
    dg_category(shape, &compose, &diff)
}

/// `Q[y]/(y²) ⊗ Λ[x]` with `|y| = 0`, `|x| = 1`, `yx = -xy` and `dy = x`; cohomology spanned by `1, xy`.
pub fn dg_four(mode: GradingMode) -> AInfCategory {
    dg_algebra(
        mode,
        &[("1", 0), ("y", 0), ("x", 1), ("xy", 1)],
        "1",
        &[("x", "y", &[(1, "xy")]), ("y", "x", &[(-1, "xy")])],
        &[("y", &[(1, "x")])],
    )
    .expect("valid instance")
}

/// A dg algebra with a nontrivial triple Massey product `<x, y, z>`: `xy = du`, `yz = dv`,
/// `uz = w`, `xv = sign·w`.
pub fn massey(sign: i64) -> AInfCategory {
    dg_algebra(
        GradingMode::Z,
        &[("1", 0), ("x", 1), ("y", 1), ("z", 1), ("u", 1), ("v", 1), ("e1", 2), ("e2", 2), ("w", 2)],
        "1",
        &[
            ("x", "y", &[(1, "e1")]),
            ("y", "z", &[(1, "e2")]),
            ("u", "z", &[(1, "w")]),
            ("x", "v", &[(sign, "w")]),
        ],
        &[("u", &[(1, "e1")]), ("v", &[(1, "e2")])],
    )
    .expect("valid instance")
}

/// `Q[x]/(x²)` with `|x| = 0`.
pub fn dual_numbers() -> AInfCategory {
    dg_algebra(GradingMode::Z, &[("1", 0), ("x", 0)], "1", &[], &[]).expect("valid instance")
}

/// The deformation of the dual numbers with `x·x = q`.
pub fn dual_numbers_deformed(base: &BaseSpec) -> AInfDeformation {
    let c = Arc::new(dual_numbers());
    let mut products = c.products().clone();
    let x = Gen::new(0, 0, 1);
    products.add_term(vec![x, x], &VectorB::single(0, base.var(0)));
    AInfDeformation::new(base.clone(), c, products, 2).expect("valid instance")
}

/// `Q[x]/(x³)` with `|x| = 2` and zero differential.
pub fn truncated_polynomial() -> AInfCategory {
    dg_algebra(GradingMode::Z, &[("1", 0), ("x", 2), ("x2", 4)], "1", &[("x", "x", &[(1, "x2")])], &[]).expect("valid instance")
}

/// `Q[x]/(x³)` deformed only by the central curvature `q·x`.
pub fn central_curvature(base: &BaseSpec) -> AInfDeformation {
    let c = Arc::new(truncated_polynomial());
    let mut products = c.products().clone();
    products.add_nullary(0, &VectorB::single(1, base.var(0)));
    AInfDeformation::new(base.clone(), c, products, 2).expect("valid instance")
}

/// Two objects `X, Y` with only identities as endomorphisms and `Hom(X, Y) = span(s, t)`,
/// `|s| = 0`, `|t| = 1`, zero differential.
pub fn two_term_complex() -> AInfCategory {
    let mode = GradingMode::Z;
    let mut homs = BTreeMap::new();
    homs.insert((0, 0), GradedBasis::new(mode, vec![("1X".into(), 0)]).unwrap());
    homs.insert((1, 1), GradedBasis::new(mode, vec![("1Y".into(), 0)]).unwrap());
    homs.insert((0, 1), GradedBasis::new(mode, vec![("s".into(), 0), ("t".into(), 1)]).unwrap());
    let shape = Shape::new(mode, vec!["X".into(), "Y".into()], homs, vec![Some(0), Some(0)]).unwrap();
    dg_category(shape, &[], &[]).expect("valid instance")
}

/// The deformation of [`two_term_complex`] with differential `s ↦ q·t`.
pub fn two_term_deformed(base: &BaseSpec) -> AInfDeformation {
    let c = Arc::new(two_term_complex());
    let mut products = c.products().clone();
    products.add_term(vec![Gen::new(0, 1, 0)], &VectorB::single(1, base.var(0)));
    AInfDeformation::new(base.clone(), c, products, 2).expect("valid instance")
}

/// Rational vector from integer entries.
pub fn qvec(entries: &[i64]) -> Vec<Q> {
    entries.iter().map(|&x| q(x)).collect()
}

/// Adds `delta` to the products of a deformation, unchecked.
pub fn perturbed(d: &AInfDeformation, delta: &Multilinear) -> AInfDeformation {
    AInfDeformation::from_parts(
        d.base().clone(),
        d.reference().clone(),
        d.products().add(delta),
        d.k_max().max(delta.max_arity()),
        d.complete(),
    )
}

/// Objects `X, Y`: `End(X) = span(1X, uX, eX)` with `d uX = eX`, `End(Y) = span(1Y)`,
/// `Hom(X, Y) = span(s, t)` with `s∘uX = t`.
pub fn exact_pair() -> AInfCategory {
    let mode = GradingMode::Z;
    let mut homs = BTreeMap::new();
    homs.insert((0, 0), GradedBasis::new(mode, vec![("1X".into(), 0), ("uX".into(), 1), ("eX".into(), 2)]).unwrap());
    homs.insert((1, 1), GradedBasis::new(mode, vec![("1Y".into(), 0)]).unwrap());
    homs.insert((0, 1), GradedBasis::new(mode, vec![("s".into(), 0), ("t".into(), 1)]).unwrap());
    let shape = Shape::new(mode, vec!["X".into(), "Y".into()], homs, vec![Some(0), Some(0)]).unwrap();
    let compose = [(Gen::new(0, 1, 0), Gen::new(0, 0, 1), VectorB::unit(1))];
    let differential = [(Gen::new(0, 0, 1), VectorB::unit(2))];
    dg_category(shape, &compose, &differential).expect("valid instance")
}

/// The deformation of [`exact_pair`] with `μ¹(s) = q·t`.
pub fn exact_pair_deformed(base: &BaseSpec) -> AInfDeformation {
    let c = Arc::new(exact_pair());
    let mut products = c.products().clone();
    products.add_term(vec![Gen::new(0, 1, 0)], &VectorB::single(1, base.var(0)));
    AInfDeformation::new(base.clone(), c, products, 2).expect("valid instance")
}
