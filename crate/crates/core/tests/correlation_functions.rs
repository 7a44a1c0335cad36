//! Correlation functions against free-field formulas.

use voatwist::correlation::{check_all, five_point, four_point, solve_blocks, three_point, BlockDatum, RestrictedBlock, Route, Sample, Side};
use voatwist::exponent::Exponent;
use voatwist::mpf::MultiPointFunction;
use voatwist::rational::{q, qi, Rational};
use voatwist::voa::{GradedVector, ModuleInstance, ModuleKind, Monomial, Twist, VoaInstance};
use voatwist::zhu::TruncationWindow;

fn vars(xs: &[&str]) -> Vec<String> {
    xs.iter().map(|s| s.to_string()).collect()
}

fn single_block(m1: ModuleInstance, m2: ModuleInstance, m3: ModuleInstance) -> RestrictedBlock {
    let datum = BlockDatum::new(m1, m2, m3, TruncationWindow::new(Exponent::int(5))).unwrap();
    let blocks = solve_blocks(&datum).unwrap().blocks();
    assert_eq!(blocks.len(), 1);
    blocks.into_iter().next().unwrap()
}

/// A one-dimensional block with the current `a`, the vector `e^lambda` and the pairings `(lambda|a)`, `(a|a)`.
type Fixture = (RestrictedBlock, GradedVector, GradedVector, Rational, Rational);

fn heisenberg_block() -> Fixture {
    let h = VoaInstance::heisenberg_rank_one(Twist::Theta);
    let t = h.module(ModuleKind::Twisted { sign: 1 });
    let block = single_block(h.module(ModuleKind::Charged(vec![q(1, 2)])), t.clone(), t);
    (block, h.generator(0), GradedVector::basis(Monomial::lattice(vec![q(1, 2)])), q(1, 2), qi(1))
}

fn lattice_block() -> Fixture {
    let l = VoaInstance::lattice_a1(Twist::Theta);
    let block = single_block(l.module(ModuleKind::HalfCoset), l.module(ModuleKind::Twisted { sign: 1 }), l.module(ModuleKind::Twisted { sign: -1 }));
    (block, l.generator(0), GradedVector::basis(Monomial::lattice(vec![q(1, 2)])), qi(1), qi(2))
}

/// `pairing z^{-1/2} w^{1/2} / (z - w)` in the given variables.
fn one_current(all: &[&str], z: &str, pairing: &Rational) -> MultiPointFunction {
    let vs = vars(all);
    MultiPointFunction::var_pow(vs.clone(), z, Exponent::new(-1, 2))
        .mul(&MultiPointFunction::var_pow(vs.clone(), "w", Exponent::new(1, 2)))
        .mul(&MultiPointFunction::diagonal_pole(vs, z, "w", 1))
        .scale(pairing)
}

/// `norm ((z1/z2)^{1/2} + (z2/z1)^{1/2}) / (2 (z1 - z2)^2)`.
fn twisted_propagator(all: &[&str], norm: &Rational) -> MultiPointFunction {
    let vs = vars(all);
    let half = |a: &str, b: &str| MultiPointFunction::var_pow(vs.clone(), a, Exponent::new(1, 2)).mul(&MultiPointFunction::var_pow(vs.clone(), b, Exponent::new(-1, 2)));
    half("z1", "z2").add(&half("z2", "z1")).mul(&MultiPointFunction::diagonal_pole(vs.clone(), "z1", "z2", 2)).scale(&(norm / qi(2)))
}

fn bottoms(block: &RestrictedBlock) -> (Vec<Rational>, Vec<Rational>) {
    let unit = |n: usize| {
        let mut v = vec![qi(0); n];
        v[0] = qi(1);
        v
    };
    (unit(block.datum().u3_basis().len()), unit(block.datum().u2_basis().len()))
}

fn three_point_constant(block: &RestrictedBlock, v: &GradedVector, u3: &[Rational], u2: &[Rational]) -> Rational {
    let s = three_point(block, u3, v, u2).unwrap();
    let c = block.value(u3, v, u2).unwrap();
    assert!(s.rational_equal(&MultiPointFunction::monomial(vars(&["w"]), vec![Exponent::zero()], c.clone())));
    assert_ne!(c, qi(0));
    c
}

#[test]
fn four_point_functions_match_the_twisted_current_formula() {
    for (block, a, v, pairing, _) in [heisenberg_block(), lattice_block()] {
        let (u3, u2) = bottoms(&block);
        let c = three_point_constant(&block, &v, &u3, &u2);
        let expected = one_current(&["z1", "w"], "z1", &pairing).scale(&c);
        for side in [Side::Left, Side::Right] {
            let got = four_point(&block, &u3, &a, &v, &u2, side).unwrap();
            assert!(got.rational_equal(&expected), "{side:?}: {got:?}");
        }
    }
}

#[test]
fn five_point_functions_match_the_wick_formula() {
    for (block, a, v, pairing, norm) in [heisenberg_block(), lattice_block()] {
        let (u3, u2) = bottoms(&block);
        let c = three_point_constant(&block, &v, &u3, &u2);
        let all = ["z1", "z2", "w"];
        let expected = one_current(&all, "z1", &pairing).mul(&one_current(&all, "z2", &pairing)).add(&twisted_propagator(&all, &norm)).scale(&c);
        for route in Route::ALL {
            let got = five_point(&block, &u3, &a, &a, &v, &u2, route).unwrap();
            assert!(got.rational_equal(&expected), "{route:?}: {got:?}");
        }
    }
}

#[test]
fn every_property_holds_on_both_blocks() {
    for (block, ..) in [heisenberg_block(), lattice_block()] {
        let sample = Sample::standard(block.datum(), Exponent::int(1));
        for r in check_all(&block, &sample).unwrap() {
            assert!(r.passed() && r.cases > 0, "{r:?}");
        }
    }
}

#[test]
fn sign_mismatched_lattice_blocks_vanish() {
    let l = VoaInstance::lattice_a1(Twist::Theta);
    for (m1, s2, s3) in [(ModuleKind::Adjoint, 1, -1), (ModuleKind::HalfCoset, 1, 1)] {
        let datum = BlockDatum::new(l.module(m1), l.module(ModuleKind::Twisted { sign: s2 }), l.module(ModuleKind::Twisted { sign: s3 }), TruncationWindow::new(Exponent::int(4))).unwrap();
        assert_eq!(solve_blocks(&datum).unwrap().dim(), 0);
    }
}
