//! Reduced algebras and fusion rules against known structure.

use voatwist::exponent::Exponent;
use voatwist::fusion::{cross_validate, fusion_rule, table_queries, FusionCache, FusionQuery};
use voatwist::rational::{q, qi};
use voatwist::voa::{ModuleKind, Twist, VoaInstance};
use voatwist::zhu::{quotient_algebra, quotient_bimodule, BimoduleMode, Reduction, TruncationWindow};

fn window(d: i64) -> TruncationWindow {
    TruncationWindow::new(Exponent::int(d))
}

#[test]
fn untwisted_heisenberg_reduction_keeps_one_class_per_weight() {
    let h = VoaInstance::heisenberg_rank_one(Twist::Identity);
    for d in 1..=4 {
        let r = Reduction::build(&h.adjoint(), &BimoduleMode::Ag, &window(d), false).unwrap();
        let standard = r.standard_monomials();
        assert_eq!(standard.len() as i64, d + 1, "window {d}");
        for k in 0..=d {
            assert_eq!(standard.iter().filter(|m| h.adjoint().monomial_degree(m) == Exponent::int(k)).count(), 1, "weight {k}");
        }
    }
}

#[test]
fn twisted_algebras_are_associative_with_central_omega() {
    for voa in [VoaInstance::heisenberg_rank_one(Twist::Theta), VoaInstance::lattice_a1(Twist::Theta)] {
        let a = quotient_algebra(&voa, &window(4)).unwrap();
        assert!(a.is_associative_unital());
        assert!(a.omega_is_central());
        let omega = a.omega().expect("omega survives the quotient");
        let mut expected = vec![qi(0); a.dim()];
        expected[a.identity_index()] = q(1, 16);
        assert_eq!(omega, expected.as_slice(), "omega acts by the twisted conformal weight");
    }
}

#[test]
fn bimodule_actions_commute() {
    let l = VoaInstance::lattice_a1(Twist::Theta);
    let a = quotient_algebra(&l, &window(4)).unwrap();
    for kind in [ModuleKind::Adjoint, ModuleKind::HalfCoset] {
        for mode in [BimoduleMode::Ag, BimoduleMode::Bg(q(1, 4))] {
            let b = quotient_bimodule(&l.module(kind.clone()), &a, &mode, &window(4)).unwrap();
            assert!(b.actions_commute(), "{kind:?} {mode:?}");
        }
    }
}

fn flip(query: &FusionQuery) -> FusionQuery {
    let l = VoaInstance::lattice_a1(Twist::Theta);
    let neg = |m: &voatwist::voa::ModuleInstance| match m.kind() {
        ModuleKind::Twisted { sign } => l.module(ModuleKind::Twisted { sign: -sign }),
        other => l.module(other.clone()),
    };
    FusionQuery::new(neg(&query.m1), neg(&query.m2), neg(&query.m3))
}

#[test]
fn fusion_rules_are_invariant_under_swapping_both_signs() {
    let cache = FusionCache::new();
    for query in table_queries().into_iter().skip(1) {
        let a = cache.tensor_dimension(&query, &window(3)).unwrap();
        let b = cache.tensor_dimension(&flip(&query), &window(3)).unwrap();
        assert_eq!(a, b, "{}", query.label());
    }
}

#[test]
fn fusion_rules_are_bounded_by_bottom_dimensions() {
    let cache = FusionCache::new();
    for query in table_queries() {
        let n = cache.tensor_dimension(&query, &window(3)).unwrap();
        let bound = query.m1.bottom().len() * query.m2.bottom().len() * query.m3.bottom().len();
        assert!(n <= bound, "{}: {n} > {bound}", query.label());
    }
}

#[test]
fn both_routes_agree_and_are_stable() {
    let l = VoaInstance::lattice_a1(Twist::Theta);
    let query = FusionQuery::new(l.module(ModuleKind::HalfCoset), l.module(ModuleKind::Twisted { sign: 1 }), l.module(ModuleKind::Twisted { sign: -1 }));
    let cv = cross_validate(&query, &window(3)).unwrap();
    assert_eq!((cv.tensor, cv.blocks), (1, 1));
    let rule = fusion_rule(&query, &window(3)).unwrap();
    assert!(rule.stable);
    assert_eq!(rule.dimension, 1);
}
