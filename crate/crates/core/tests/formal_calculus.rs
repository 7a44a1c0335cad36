//! Formal expansions and residues against hand-derived series.

use proptest::prelude::*;

use voatwist::exponent::Exponent;
use voatwist::kernels::{f_kernel, f_kernel_expansion, residue_sum, KernelIndex};
use voatwist::mpf::MultiPointFunction;
use voatwist::poly::Poly;
use voatwist::rational::{q, qi, Rational};
use voatwist::series::{ExpansionSite, PuiseuxSeries, Window};

fn zw() -> Vec<String> {
    vec!["z".into(), "w".into()]
}

/// `x (x - 1) ... (x - k + 1) / k!` by direct multiplication.
fn gen_binomial(x: &Rational, k: u32) -> Rational {
    let mut out = qi(1);
    for j in 0..k {
        out = out * (x - qi(j as i64)) / qi(j as i64 + 1);
    }
    out
}

fn w_term(e: Exponent, c: Rational) -> MultiPointFunction {
    MultiPointFunction::monomial(vec!["w".into()], vec![e], c)
}

fn coefficient(s: &PuiseuxSeries<MultiPointFunction>, e: Exponent) -> MultiPointFunction {
    s.get(e).cloned().unwrap_or_else(|| MultiPointFunction::zero(vec!["w".into()]))
}

#[test]
fn pole_expands_at_zero_as_negative_binomial_series() {
    for l in 1..=4u32 {
        let f = MultiPointFunction::diagonal_pole(zw(), "z", "w", l);
        let s = f.expand(&ExpansionSite::AtZero("z".into()), Exponent::int(6)).unwrap();
        for k in 0..=6i64 {
            let sign = if l % 2 == 0 { qi(1) } else { qi(-1) };
            let expected = w_term(Exponent::int(-(l as i64) - k), sign * gen_binomial(&qi(l as i64 + k - 1), k as u32));
            assert!(coefficient(&s, Exponent::int(k)).rational_equal(&expected), "l={l} k={k}");
        }
    }
}

#[test]
fn pole_expands_at_infinity_as_geometric_series() {
    for l in 1..=4u32 {
        let f = MultiPointFunction::diagonal_pole(zw(), "z", "w", l);
        let s = f.expand(&ExpansionSite::AtInfinity("z".into()), Exponent::int(-10)).unwrap();
        for k in 0..=(10 - l as i64) {
            let expected = w_term(Exponent::int(k), gen_binomial(&qi(l as i64 + k - 1), k as u32));
            assert!(coefficient(&s, Exponent::int(-(l as i64) - k)).rational_equal(&expected), "l={l} k={k}");
        }
    }
}

#[test]
fn pole_at_diagonal_is_a_single_term() {
    let f = MultiPointFunction::diagonal_pole(zw(), "z", "w", 3);
    let s = f.expand(&ExpansionSite::AtDiagonal("z".into(), "w".into()), Exponent::int(4)).unwrap();
    let nonzero: Vec<Exponent> = s.terms().map(|(e, _)| *e).collect();
    assert_eq!(nonzero, vec![Exponent::int(-3)]);
}

/// `F_{n,i}` at `z = 0`: the coefficient of `z^{j-n}` is `-binom(n-j-1, i) w^{n-j-1-i}`.
fn kernel_at_zero_oracle(n: Exponent, i: u32, j: i64) -> MultiPointFunction {
    let nq = n.to_rational();
    w_term(n - Exponent::int(j + 1 + i as i64), -gen_binomial(&(nq - qi(j + 1)), i))
}

/// `F_{n,i}` at `z = infinity`: the coefficient of `z^{-n-j-1}` is `binom(n+j, i) w^{n+j-i}`.
fn kernel_at_infinity_oracle(n: Exponent, i: u32, j: i64) -> MultiPointFunction {
    let nq = n.to_rational();
    w_term(n + Exponent::int(j - i as i64), gen_binomial(&(nq + qi(j)), i))
}

#[test]
fn kernels_match_termwise_differentiation_of_the_geometric_series() {
    for num in -4..=4 {
        let n = Exponent::new(num, 2);
        for i in 0..=3u32 {
            let f = f_kernel(KernelIndex::new(n, i));
            let at0 = f.expand(&ExpansionSite::AtZero("z".into()), -n + Exponent::int(8)).unwrap();
            let atinf = f.expand(&ExpansionSite::AtInfinity("z".into()), -n - Exponent::int(9)).unwrap();
            for j in 0..=8 {
                assert!(coefficient(&at0, Exponent::int(j) - n).rational_equal(&kernel_at_zero_oracle(n, i, j)), "n={n} i={i} j={j}");
                assert!(coefficient(&atinf, -n - Exponent::int(j + 1)).rational_equal(&kernel_at_infinity_oracle(n, i, j)), "n={n} i={i} j={j}");
            }
        }
    }
}

#[test]
fn closed_form_expansions_match_the_oracle() {
    let n = Exponent::new(3, 2);
    let s = f_kernel_expansion(KernelIndex::new(n, 2), &ExpansionSite::AtZero("z".into()), Exponent::int(4)).unwrap();
    for j in 0..=5 {
        assert!(coefficient(&s, Exponent::int(j) - n).rational_equal(&kernel_at_zero_oracle(n, 2, j)));
    }
}

#[test]
fn residue_sum_of_simple_pole_cancels() {
    let f = MultiPointFunction::diagonal_pole(zw(), "z", "w", 1);
    assert!(residue_sum(&f, 0, 2, Exponent::int(5)).unwrap().is_zero());
    let g = f.mul(&MultiPointFunction::monomial(zw(), vec![Exponent::new(-1, 2), Exponent::new(1, 2)], q(3, 2)));
    assert!(residue_sum(&g, 1, 2, Exponent::int(5)).unwrap().is_zero());
}

fn small_poly() -> impl Strategy<Value = Poly> {
    prop::collection::vec((-3i64..=3, -3i64..=3, -4i64..=4, 1i64..=3), 1..4).prop_map(|terms| {
        let mut p = Poly::zero(2);
        for (a, b, n, d) in terms {
            p.add_term(vec![Exponent::new(a, 2), Exponent::new(b, 2)], q(n, d));
        }
        p
    })
}

fn small_function() -> impl Strategy<Value = MultiPointFunction> {
    (small_poly(), 0u32..3).prop_map(|(p, l)| MultiPointFunction::new(zw(), p, [((0, 1), l)]))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn expansion_is_linear(f in small_function(), g in small_function()) {
        let site = ExpansionSite::AtZero("z".into());
        let t = Exponent::int(4);
        let lhs = f.add(&g).expand(&site, t).unwrap();
        let rhs = f.expand(&site, t).unwrap().try_add(&g.expand(&site, t).unwrap()).unwrap();
        prop_assert!(lhs.agrees_with(&rhs));
    }

    #[test]
    fn multiplication_commutes_and_distributes(f in small_function(), g in small_function(), h in small_function()) {
        prop_assert!(f.mul(&g).rational_equal(&g.mul(&f)));
        prop_assert!(f.mul(&g.add(&h)).rational_equal(&f.mul(&g).add(&f.mul(&h))));
    }

    #[test]
    fn derivative_obeys_leibniz(f in small_function(), g in small_function()) {
        let lhs = f.mul(&g).derivative("w");
        let rhs = f.derivative("w").mul(&g).add(&f.mul(&g.derivative("w")));
        prop_assert!(lhs.rational_equal(&rhs));
    }

    #[test]
    fn function_json_round_trips(f in small_function()) {
        let back = MultiPointFunction::from_json(&f.to_json()).unwrap();
        prop_assert!(back.rational_equal(&f));
    }

    #[test]
    fn series_json_round_trips(terms in prop::collection::vec((-6i64..=6, -5i64..=5), 0..6), hi in -3i64..=8) {
        let s = PuiseuxSeries::new("x", terms.into_iter().map(|(e, c)| (Exponent::new(e, 2), qi(c))), Window::Below(Exponent::int(hi)));
        let back = PuiseuxSeries::from_json(&s.to_json()).unwrap();
        prop_assert!(back.agrees_with(&s));
        prop_assert_eq!(back.window(), s.window());
    }
}
