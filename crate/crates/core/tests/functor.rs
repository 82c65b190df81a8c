mod common;

use std::collections::BTreeMap;
use std::sync::Arc;

use ainf_core::ainf::{Products, Structure};
use ainf_core::deformed::deformed_minimal_model;
use ainf_core::functor::{DeformedFunctor, FunctorClass};
use ainf_core::graded::{GradingMode, VectorB};
use ainf_core::instances::*;
use ainf_core::splitting::split;
use ainf_core::twisted::{uncurve, uncurving_gauge};
use common::*;

const BOUND: usize = 3;

fn negate(r: &BTreeMap<usize, VectorB>) -> BTreeMap<usize, VectorB> {
    r.iter().map(|(x, v)| (*x, v.neg())).collect()
}

/// Model functor into the source, followed by two gauge functors.
fn chain(case: &Case, seed: u64) -> [DeformedFunctor; 3] {
    let mut rng = rng(seed);
    let sp = split(case.classical.as_ref()).unwrap();
    let model = deformed_minimal_model(&case.source, &sp, BOUND).unwrap();
    let r1 = random_uncurving(&mut rng, &case.source);
    let d1 = uncurve(&case.source, &negate(&r1)).unwrap();
    let back = uncurve(&d1, &r1).unwrap();
    assert_eq!(back.products(), case.source.products(), "{}", case.label);
    let g = uncurving_gauge(&d1, &back, &r1).unwrap();
    let r2 = random_uncurving(&mut rng, &case.source);
    let d2 = uncurve(&d1, &negate(&r2)).unwrap();
    let h = uncurving_gauge(&d2, &uncurve(&d2, &r2).unwrap(), &r2).unwrap();
    [model.functor, g, h]
}

#[test]
fn composition_is_associative() {
    for (n, case) in corpus(6, 31).iter().enumerate() {
        let [f, g, h] = chain(case, n as u64);
        let left = DeformedFunctor::compose(&h, &DeformedFunctor::compose(&g, &f, BOUND).unwrap(), BOUND).unwrap();
        let right = DeformedFunctor::compose(&DeformedFunctor::compose(&h, &g, BOUND).unwrap(), &f, BOUND).unwrap();
        assert_eq!(left.components(), right.components(), "{}", case.label);
        let r = left.check(BOUND);
        assert!(r.is_ok(), "{}: {}", case.label, r.to_text());
    }
}

#[test]
fn identities_are_units() {
    for (n, case) in corpus(6, 32).iter().enumerate() {
        let [f, g, _] = chain(case, 100 + n as u64);
        for u in [f, g] {
            let left = DeformedFunctor::compose(&DeformedFunctor::identity(u.target().clone()), &u, BOUND).unwrap();
            let right = DeformedFunctor::compose(&u, &DeformedFunctor::identity(u.source().clone()), BOUND).unwrap();
            let mut expected = u.components().clone();
            expected.terms.retain(|k, v| k.len() <= BOUND && !v.is_zero());
            let clean = |f: &DeformedFunctor| {
                let mut c = f.components().clone();
                c.terms.retain(|_, v| !v.is_zero());
                c.nullary.retain(|_, v| !v.is_zero());
                c
            };
            expected.nullary.retain(|_, v| !v.is_zero());
            assert_eq!(clean(&left), expected, "{}", case.label);
            assert_eq!(clean(&right), expected, "{}", case.label);
        }
    }
}

#[test]
fn reduction_commutes_with_composition() {
    for (n, case) in corpus(6, 33).iter().enumerate() {
        let [f, g, _] = chain(case, 200 + n as u64);
        let reduced = DeformedFunctor::compose(&g, &f, BOUND).unwrap().leading_term();
        let composed = DeformedFunctor::compose(&g.leading_term(), &f.leading_term(), BOUND).unwrap();
        assert_eq!(reduced.components(), composed.components(), "{}", case.label);
        assert_eq!(reduced.classify(), composed.classify());
    }
}

#[test]
fn gauge_functors_transport_uncurvings() {
    let mut rng = rng(5);
    for case in corpus(8, 34) {
        let r = random_uncurving(&mut rng, &case.source);
        let u = uncurve(&case.source, &r).unwrap();
        let g = uncurving_gauge(&case.source, &u, &r).unwrap();
        assert_eq!(g.classify(), FunctorClass::GaugeEquivalence);
        let report = g.check(4);
        assert!(report.is_ok(), "{}: {}", case.label, report.to_text());
        let s = random_uncurving(&mut rng, &case.source);
        let moved: BTreeMap<usize, VectorB> = (0..case.source.shape().num_objects())
            .map(|x| (x, g.transport_uncurving(x, &s.get(&x).cloned().unwrap_or_default())))
            .filter(|(_, v)| !v.is_zero())
            .collect();
        let via_u = uncurve(&u, &s).unwrap();
        let direct = uncurve(&case.source, &moved).unwrap();
        assert_eq!(via_u.products(), direct.products(), "{}", case.label);
    }
}

#[test]
fn wrong_curvature_component_breaks_the_functor() {
    let mut rng = rng(6);
    let mut detected = 0;
    for case in corpus(12, 35) {
        let d = &case.source;
        let r = random_uncurving(&mut rng, d);
        let u = uncurve(d, &r).unwrap();
        let doubled: BTreeMap<usize, VectorB> = r.iter().map(|(x, v)| (*x, v.add(v))).collect();
        let bad = DeformedFunctor::gauge(Arc::new(Products::of(&u)), Arc::new(Products::of(d)), &doubled).unwrap();
        if uncurve(d, &doubled).unwrap().products() != u.products() {
            assert!(!bad.check(3).is_ok(), "{}", case.label);
            detected += 1;
        }
    }
    assert!(detected > 0);
}

#[test]
fn classification_of_shipped_functors() {
    let id = DeformedFunctor::identity(Arc::new(Products::of(&dg_four(GradingMode::Z))));
    assert_eq!(id.classify(), FunctorClass::GaugeEquivalence);
    let c = massey(1);
    let sp = split(&c).unwrap();
    let (_, f) = ainf_core::kadeishvili::minimal_model(&c, &sp, 4).unwrap();
    assert_eq!(f.classify(), FunctorClass::QuasiIsomorphism);
    let c = dg_four(GradingMode::Z);
    let sp = split(&c).unwrap();
    let (_, f) = ainf_core::kadeishvili::minimal_model(&c, &sp, 4).unwrap();
    assert_eq!(f.classify(), FunctorClass::QuasiIsomorphism);
    let bad = DeformedFunctor::new(
        f.source().clone(),
        f.target().clone(),
        f.object_map().to_vec(),
        Default::default(),
        1,
        true,
    )
    .unwrap();
    assert_eq!(bad.classify(), FunctorClass::NoneOfThese);
}
