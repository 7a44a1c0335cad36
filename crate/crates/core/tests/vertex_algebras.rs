//! Heisenberg and lattice algebras and their modules against textbook formulas.

use proptest::prelude::*;

use voatwist::exponent::Exponent;
use voatwist::rational::{q, qi, Rational};
use voatwist::voa::{GradedVector, ModuleInstance, ModuleKind, Monomial, Twist, VoaInstance};

fn basis_vectors(m: &ModuleInstance, max_degree: Exponent) -> Vec<GradedVector> {
    m.basis(max_degree).into_iter().map(GradedVector::basis).collect()
}

/// Number of partitions of `n` into parts from `parts`, by dynamic programming.
fn partitions(n: usize, parts: &[usize]) -> u64 {
    let mut ways = vec![0u64; n + 1];
    ways[0] = 1;
    for &p in parts {
        for k in p..=n {
            ways[k] += ways[k - p];
        }
    }
    ways[n]
}

fn count_at(m: &ModuleInstance, max: Exponent, degree: Exponent) -> u64 {
    m.basis(max).iter().filter(|b| m.monomial_degree(b) == degree).count() as u64
}

#[test]
fn twisted_fock_space_has_the_odd_partition_character() {
    let v = VoaInstance::heisenberg_rank_one(Twist::Theta);
    let m = v.module(ModuleKind::Twisted { sign: 1 });
    let odd: Vec<usize> = (1..=12).step_by(2).collect();
    for k in 0..=12 {
        assert_eq!(count_at(&m, Exponent::int(6), Exponent::new(k, 2)), partitions(k as usize, &odd), "degree {k}/2");
    }
}

#[test]
fn lattice_algebra_has_the_theta_function_character() {
    let v = VoaInstance::lattice_a1(Twist::Theta);
    let adj = v.adjoint();
    let all: Vec<usize> = (1..=6).collect();
    for n in 0..=5i64 {
        let mut expected = 0;
        for c in -3i64..=3 {
            if c * c <= n {
                expected += partitions((n - c * c) as usize, &all);
            }
        }
        assert_eq!(count_at(&adj, Exponent::int(5), Exponent::int(n)), expected, "weight {n}");
    }
}

fn commutator_defect(m: &ModuleInstance, a: &GradedVector, r: Exponent, s: Exponent, v: &GradedVector) -> GradedVector {
    let ab = m.mode_action(a, r, &m.mode_action(a, s, v).unwrap()).unwrap();
    let ba = m.mode_action(a, s, &m.mode_action(a, r, v).unwrap()).unwrap();
    let central = if r + s == Exponent::zero() { v.scale(&r.to_rational()) } else { GradedVector::zero() };
    ab.sub(&ba).sub(&central)
}

#[test]
fn heisenberg_modes_satisfy_the_canonical_commutation_relations() {
    let v = VoaInstance::heisenberg_rank_one(Twist::Theta);
    let a = v.generator(0);
    let twisted = v.module(ModuleKind::Twisted { sign: 1 });
    for w in basis_vectors(&twisted, Exponent::int(2)) {
        for r in -5..=5 {
            for s in -5..=5 {
                let d = commutator_defect(&twisted, &a, Exponent::new(2 * r + 1, 2), Exponent::new(2 * s + 1, 2), &w);
                assert!(d.is_zero(), "twisted r={r} s={s}");
            }
        }
    }
    let charged = v.module(ModuleKind::Charged(vec![q(1, 2)]));
    for w in basis_vectors(&charged, Exponent::int(2)) {
        for r in -3..=3 {
            for s in -3..=3 {
                assert!(commutator_defect(&charged, &a, Exponent::int(r), Exponent::int(s), &w).is_zero(), "charged r={r} s={s}");
            }
        }
    }
}

#[test]
fn conformal_weights_of_the_bottom_levels() {
    let h = VoaInstance::heisenberg_rank_one(Twist::Theta);
    let l = VoaInstance::lattice_a1(Twist::Theta);
    let cases: Vec<(ModuleInstance, Rational)> = vec![
        (h.module(ModuleKind::Twisted { sign: 1 }), q(1, 16)),
        (h.module(ModuleKind::Charged(vec![q(1, 2)])), q(1, 8)),
        (l.module(ModuleKind::Twisted { sign: 1 }), q(1, 16)),
        (l.module(ModuleKind::Twisted { sign: -1 }), q(1, 16)),
        (l.module(ModuleKind::HalfCoset), q(1, 4)),
        (l.adjoint(), qi(0)),
    ];
    for (m, h_expected) in cases {
        assert_eq!(m.conformal_weight(), h_expected, "{}", m.name());
        for b in m.bottom() {
            let v = GradedVector::basis(b);
            let omega = m.voa().omega();
            assert_eq!(m.zero_mode(&omega, &v).unwrap(), v.scale(&h_expected), "{}", m.name());
        }
    }
}

#[test]
fn e_plus_e_minus_acts_by_plus_or_minus_one_half_on_twisted_bottoms() {
    let l = VoaInstance::lattice_a1(Twist::Theta);
    let e = l.exp_state(qi(1)).add(&l.exp_state(qi(-1)));
    for sign in [1i8, -1] {
        let m = l.module(ModuleKind::Twisted { sign });
        let bottom = GradedVector::basis(m.bottom()[0].clone());
        assert_eq!(m.zero_mode(&e, &bottom).unwrap(), bottom.scale(&q(sign as i64, 2)));
    }
}

#[test]
fn lattice_products_follow_the_exponential_formula() {
    let l = VoaInstance::lattice_a1(Twist::Theta);
    let (plus, minus) = (l.exp_state(qi(1)), l.exp_state(qi(-1)));
    let a1 = l.generator(0);
    for n in 2..=4 {
        assert!(l.nth_product(&plus, n, &minus).is_zero());
    }
    assert_eq!(l.nth_product(&plus, 1, &minus), l.vacuum());
    assert_eq!(l.nth_product(&plus, 0, &minus), a1);
    let a2 = GradedVector::basis(Monomial::vacuum(1).with_mode(0, Exponent::int(-2)));
    let a11 = l.nth_product(&a1, -1, &a1);
    assert_eq!(l.nth_product(&plus, -1, &minus), a11.add(&a2).scale(&q(1, 2)));
}

#[test]
fn translation_covariance_on_modules() {
    let l = VoaInstance::lattice_a1(Twist::Theta);
    let adj = l.adjoint();
    let states = [l.exp_state(qi(1)), l.generator(0), l.omega()];
    for m in [l.module(ModuleKind::Twisted { sign: 1 }), l.module(ModuleKind::HalfCoset)] {
        let shift = if m.is_twisted() { Exponent::new(1, 2) } else { Exponent::zero() };
        for a in &states {
            let da = adj.l_minus_one(a);
            let sectors = l.split_sectors(a);
            for w in basis_vectors(&m, Exponent::int(1)) {
                for n in -2..=2 {
                    for (r, part) in &sectors {
                        let dpart = adj.l_minus_one(part);
                        let mode = Exponent::int(n) + if *r == 1 { shift } else { Exponent::zero() };
                        let lhs = m.mode_action(&dpart, mode, &w).unwrap();
                        let rhs = m.mode_action(part, mode - Exponent::int(1), &w).unwrap().scale(&-mode.to_rational());
                        assert_eq!(lhs, rhs, "{} n={n}", m.name());
                    }
                }
            }
            assert!(!da.is_zero());
        }
    }
}

#[test]
fn jacobi_identity_on_untwisted_modules() {
    let l = VoaInstance::lattice_a1(Twist::Theta);
    let r = l.jacobi_sweep(&l.module(ModuleKind::HalfCoset), Exponent::int(1), 1, Exponent::int(1)).unwrap();
    assert!(r.passed() && r.cases > 0, "{r:?}");
    let h = VoaInstance::heisenberg_rank_one(Twist::Theta);
    let r = h.jacobi_sweep(&h.module(ModuleKind::Charged(vec![q(1, 2)])), Exponent::int(2), 1, Exponent::int(1)).unwrap();
    assert!(r.passed() && r.cases > 0, "{r:?}");
}

#[test]
fn theta_is_an_involution_fixing_the_conformal_vector() {
    let l = VoaInstance::lattice_a1(Twist::Theta);
    for (_, v) in l.eigenbasis(Exponent::int(2)) {
        assert_eq!(l.theta_involution(&l.theta_involution(&v)), v);
    }
    assert_eq!(l.theta_involution(&l.omega()), l.omega());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn monomials_render_and_parse_back(parts in prop::collection::vec(1i64..=4, 0..4), charge in -3i64..=3) {
        let l = VoaInstance::lattice_a1(Twist::Theta);
        let mut m = Monomial::lattice(vec![q(charge, 2)]);
        for p in parts {
            m = m.with_mode(0, Exponent::int(-p));
        }
        let text = m.render(l.form());
        prop_assert_eq!(Monomial::parse(&text, l.form()).unwrap(), m);
    }

    #[test]
    fn vectors_round_trip_through_json(cs in prop::collection::vec(-5i64..=5, 3)) {
        let l = VoaInstance::lattice_a1(Twist::Theta);
        let basis = l.adjoint().basis(Exponent::int(1));
        let v: GradedVector = basis.iter().cloned().zip(cs.into_iter().map(qi)).collect();
        prop_assert_eq!(GradedVector::from_json(&v.to_json(l.form()), l.form()).unwrap(), v);
    }
}
