//! Mode actions on Fock spaces and normal-ordered vertex operators.
//!
//! Untwisted vertex operators are
//!
//! ```text
//!     Y(h^{i_1}(-n_1) ... h^{i_k}(-n_k) e^beta, z)
//!       = : d^{(n_1-1)} h^{i_1}(z) ... d^{(n_k-1)} h^{i_k}(z) Y(e^beta, z) :,
//!     Y(e^beta, z) = E^-(-beta, z) E^+(-beta, z) e_beta z^{beta(0)},
//! ```
//!
//! with creation modes on the left and annihilation modes (including
//! `h(0)`) on the right.  Twisted vertex operators on the half-integral Fock
//! space are `Y_0(e^{Delta_z} a, z)` where `Y_0` is the same normal-ordered
//! product in half-integral modes, the lattice factor being
//! `2^{-(beta|beta)} E^-(-beta, z) E^+(-beta, z) e_beta z^{-(beta|beta)/2}`.
//! All series are truncated from above at a requested power of `z`.

use num_traits::{One, ToPrimitive, Zero};
use std::collections::BTreeMap;
use std::sync::OnceLock;

use crate::exponent::Exponent;
use crate::rational::{binomial_coeff, q, qi, qpow, Rational};
use crate::voa::{Form, GradedVector, Monomial};

/// A truncated series in `z` with vector coefficients.
pub(crate) type Series = BTreeMap<Exponent, GradedVector>;

pub(crate) fn series_add(s: &mut Series, p: Exponent, v: &GradedVector, c: &Rational) {
    if v.is_zero() || c.is_zero() {
        return;
    }
    let e = s.entry(p).or_default();
    e.add_scaled(v, c);
    if e.is_zero() {
        s.remove(&p);
    }
}

/// How the group-algebra part acts on the space the operators act on.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Sector {
    /// Integral modes; labels add up.
    Untwisted,
    /// Half-integral modes; `e_beta` acts on the one-dimensional `T` by
    /// `sign^{sum of the coordinates of beta}`.
    Twisted { sign: i8 },
}

/// `h_g(m)` applied to a monomial.
pub(crate) fn apply_mode_mono(form: &Form, gen: usize, m: Exponent, v: &Monomial) -> GradedVector {
    if m.is_negative() {
        return GradedVector::basis(v.with_mode(gen, m));
    }
    if m.is_zero() {
        return GradedVector::term(v.clone(), form.pair_basis(gen, v.label()));
    }
    let mut out = GradedVector::zero();
    let mq = m.to_rational();
    for (pos, (j, mj)) in v.modes().iter().enumerate() {
        if *mj == -m {
            let g = form.gram(gen, *j);
            if !g.is_zero() {
                out.add_term(v.without(pos), &mq * g);
            }
        }
    }
    out
}

/// `h_g(m)` applied to a vector.
pub(crate) fn apply_mode(form: &Form, gen: usize, m: Exponent, v: &GradedVector) -> GradedVector {
    let mut out = GradedVector::zero();
    for (mono, c) in v.terms() {
        out.add_scaled(&apply_mode_mono(form, gen, m, mono), c);
    }
    out
}

/// `beta(m) = sum_i beta_i h_i(m)` applied to a vector.
pub(crate) fn apply_beta(form: &Form, beta: &[Rational], m: Exponent, v: &GradedVector) -> GradedVector {
    let mut out = GradedVector::zero();
    for (i, b) in beta.iter().enumerate() {
        if !b.is_zero() {
            out.add_scaled(&apply_mode(form, i, m, v), b);
        }
    }
    out
}

fn step(sector: Sector) -> Exponent {
    match sector {
        Sector::Untwisted => Exponent::int(1),
        Sector::Twisted { .. } => Exponent::new(1, 2),
    }
}

/// Positive mode values `m` of the sector with `m <= bound`.
fn positive_modes(sector: Sector, bound: Exponent) -> Vec<Exponent> {
    let mut out = Vec::new();
    let mut m = match sector {
        Sector::Untwisted => Exponent::int(1),
        Sector::Twisted { .. } => Exponent::new(1, 2),
    };
    while m <= bound {
        out.push(m);
        m += Exponent::int(1);
    }
    out
}

fn max_degree(s: &Series) -> Exponent {
    s.values().flat_map(|v| v.terms().map(|(m, _)| m.mode_degree())).max().unwrap_or_else(Exponent::zero)
}

/// `exp(sum_m coef(m) beta(m) z^{pow(m)})` applied to a series, for commuting
/// modes `m` in the given list, dropping powers above `cap`.
fn apply_exponential(
    form: &Form,
    beta: &[Rational],
    modes: &[(Exponent, Rational, Exponent)],
    s: Series,
    cap: Option<Exponent>,
) -> Series {
    let mut cur = s;
    for (m, coef, pw) in modes {
        let mut next = cur.clone();
        let mut term = cur;
        let mut k = 0i64;
        loop {
            k += 1;
            let mut t = Series::new();
            for (p, v) in &term {
                let np = *p + *pw;
                if cap.is_some_and(|c| np > c) {
                    continue;
                }
                let w = apply_beta(form, beta, *m, v);
                series_add(&mut t, np, &w, &(coef / qi(k)));
            }
            if t.is_empty() {
                break;
            }
            for (p, v) in &t {
                series_add(&mut next, *p, v, &Rational::one());
            }
            term = t;
        }
        cur = next;
    }
    cur
}

/// `Y_0(a, z) v` (twisted) or `Y(a, z) v` (untwisted) for monomials `a`, `v`,
/// keeping powers `<= max_power`.
pub(crate) fn normal_ordered(form: &Form, sector: Sector, a: &Monomial, v: &Monomial, max_power: Exponent) -> Series {
    let factors: Vec<(usize, Exponent)> = a.modes().iter().map(|(g, m)| (*g, -*m)).collect();
    let k = factors.len();
    let beta = a.label();
    let beta_zero = beta.iter().all(|x| x.is_zero());
    let st = step(sector);
    let cmin = |n: Exponent| st - n;
    let mut out = Series::new();
    for mask in 0u32..(1u32 << k) {
        let mut cur = Series::new();
        cur.insert(Exponent::zero(), GradedVector::basis(v.clone()));
        for (j, (g, n)) in factors.iter().enumerate() {
            if mask & (1 << j) == 0 {
                continue;
            }
            let nn = (n.to_int().expect("integral creation index") - 1) as u32;
            let mut next = Series::new();
            for (p, vec) in &cur {
                let mut cands: Vec<Exponent> = vec.terms().flat_map(|(mono, _)| mono.modes().iter().map(|(_, m)| -*m).collect::<Vec<_>>()).collect();
                if sector == Sector::Untwisted {
                    cands.push(Exponent::zero());
                }
                cands.sort();
                cands.dedup();
                for m in cands {
                    let c = binomial_coeff(&(-m.to_rational() - Rational::one()), nn);
                    if c.is_zero() {
                        continue;
                    }
                    let w = apply_mode(form, *g, m, vec);
                    series_add(&mut next, *p - m - *n, &w, &c);
                }
            }
            cur = next;
            if cur.is_empty() {
                break;
            }
        }
        if cur.is_empty() {
            continue;
        }
        // Lattice factor.
        if !beta_zero || matches!(sector, Sector::Twisted { .. }) {
            let mut next = Series::new();
            for (p, vec) in &cur {
                for (mono, c) in vec.terms() {
                    match sector {
                        Sector::Untwisted => {
                            let shift = Exponent::from_rational(&form.pair(beta, mono.label())).expect("small exponent");
                            let label: Vec<Rational> = mono.label().iter().zip(beta).map(|(x, y)| x + y).collect();
                            series_add(&mut next, *p + shift, &GradedVector::basis(mono.with_label(label)), c);
                        }
                        Sector::Twisted { sign } => {
                            let bb = form.pair(beta, beta);
                            let shift = Exponent::from_rational(&(-&bb / qi(2))).expect("small exponent");
                            let two = qpow(&qi(2), -bb.to_integer().to_i64().expect("integral norm"));
                            let total: Rational = beta.iter().fold(Rational::zero(), |a, b| a + b);
                            let sgn = if sign < 0 && total.to_integer().bit(0) { -Rational::one() } else { Rational::one() };
                            series_add(&mut next, *p + shift, &GradedVector::basis(mono.clone()), &(c * two * sgn));
                        }
                    }
                }
            }
            cur = next;
        }
        let creation: Vec<(usize, Exponent)> = factors.iter().enumerate().filter(|(j, _)| mask & (1 << j) == 0).map(|(_, f)| *f).collect();
        let mut remaining = creation.iter().fold(Exponent::zero(), |acc, (_, n)| acc + cmin(*n));
        let cap = max_power - remaining;
        if !beta_zero {
            let d = max_degree(&cur);
            let plus: Vec<(Exponent, Rational, Exponent)> = positive_modes(sector, d).into_iter().map(|m| (m, -m.to_rational().recip(), -m)).collect();
            cur = apply_exponential(form, beta, &plus, cur, None);
            cur.retain(|p, _| *p <= cap);
            let lowest = cur.keys().next().copied().unwrap_or(cap);
            let minus: Vec<(Exponent, Rational, Exponent)> = positive_modes(sector, cap - lowest).into_iter().map(|m| (-m, m.to_rational().recip(), m)).collect();
            cur = apply_exponential(form, beta, &minus, cur, Some(cap));
        } else {
            cur.retain(|p, _| *p <= cap);
        }
        for (g, n) in creation {
            remaining -= cmin(n);
            let cap = max_power - remaining;
            let nn = (n.to_int().expect("integral creation index") - 1) as u32;
            let mut next = Series::new();
            for (p, vec) in &cur {
                let mut mabs = st;
                while mabs - n + *p <= cap {
                    let m = -mabs;
                    let c = binomial_coeff(&(-m.to_rational() - Rational::one()), nn);
                    if !c.is_zero() {
                        let w = apply_mode(form, g, m, vec);
                        series_add(&mut next, *p + mabs - n, &w, &c);
                    }
                    mabs += Exponent::int(1);
                }
            }
            cur = next;
        }
        for (p, vec) in cur {
            if p <= max_power {
                series_add(&mut out, p, &vec, &Rational::one());
            }
        }
    }
    out
}

/// Coefficients `c_{mn}` of `-log((sqrt(1+x) + sqrt(1+y)) / 2) = sum c_{mn} x^m y^n`.
#[allow(clippy::needless_range_loop)]
pub(crate) fn delta_coefficients() -> &'static Vec<Vec<Rational>> {
    static TABLE: OnceLock<Vec<Vec<Rational>>> = OnceLock::new();
    TABLE.get_or_init(|| {
        const D: usize = 16;
        let zero = || vec![vec![Rational::zero(); D + 1]; D + 1];
        let mut u = zero();
        for k in 1..=D {
            let b = binomial_coeff(&q(1, 2), k as u32) / qi(2);
            u[k][0] += &b;
            u[0][k] += &b;
        }
        let mul = |a: &Vec<Vec<Rational>>, b: &Vec<Vec<Rational>>| {
            let mut c = zero();
            for i in 0..=D {
                for j in 0..=D - i {
                    if a[i][j].is_zero() {
                        continue;
                    }
                    for k in 0..=D - i - j {
                        for l in 0..=D - i - j - k {
                            if !b[k][l].is_zero() {
                                c[i + k][j + l] += &a[i][j] * &b[k][l];
                            }
                        }
                    }
                }
            }
            c
        };
        let mut out = zero();
        let mut power = u.clone();
        for k in 1..=D {
            let f = if k % 2 == 1 { -qi(1) } else { qi(1) } / qi(k as i64);
            for i in 0..=D {
                for j in 0..=D - i {
                    out[i][j] += &power[i][j] * &f;
                }
            }
            power = mul(&power, &u);
        }
        out
    })
}

/// `e^{Delta_z} a = sum_k z^{-k} a_k`, returned as pairs `(k, a_k)`.
pub(crate) fn delta_exponential(form: &Form, a: &GradedVector) -> Vec<(i64, GradedVector)> {
    let c = delta_coefficients();
    let d = form.rank();
    let mut out: BTreeMap<i64, GradedVector> = BTreeMap::new();
    let mut term: BTreeMap<i64, GradedVector> = BTreeMap::new();
    term.insert(0, a.clone());
    out.insert(0, a.clone());
    let mut k = 0i64;
    loop {
        k += 1;
        let mut next: BTreeMap<i64, GradedVector> = BTreeMap::new();
        for (lo, v) in &term {
            let deg = v.terms().map(|(m, _)| m.mode_degree().to_int().expect("integral")).max().unwrap_or(0);
            for m in 0..=deg {
                for n in 0..=deg {
                    if m + n == 0 || m + n > deg || c[m as usize][n as usize].is_zero() {
                        continue;
                    }
                    let mut acc = GradedVector::zero();
                    for i in 0..d {
                        for j in 0..d {
                            let g = form.dual(i, j);
                            if g.is_zero() {
                                continue;
                            }
                            let w = apply_mode(form, j, Exponent::int(n), v);
                            let w = apply_mode(form, i, Exponent::int(m), &w);
                            acc.add_scaled(&w, g);
                        }
                    }
                    let f = &c[m as usize][n as usize] / qi(k);
                    next.entry(lo + m + n).or_default().add_scaled(&acc, &f);
                }
            }
        }
        next.retain(|_, v| !v.is_zero());
        if next.is_empty() {
            break;
        }
        for (lo, v) in &next {
            out.entry(*lo).or_default().add_scaled(v, &Rational::one());
        }
        term = next;
    }
    out.into_iter().filter(|(_, v)| !v.is_zero()).collect()
}

/// `Y(a, z) v` on an untwisted space or `Y^theta(a, z) v` on the twisted
/// Fock space, for vectors `a`, `v`, truncated at `max_power`.
/// `Y(a, z) v` for monomials, keeping powers `<= max_power`.
pub(crate) fn monomial_series(form: &Form, sector: Sector, a: &Monomial, v: &Monomial, max_power: Exponent) -> Series {
    let mut out = Series::new();
    let pieces: Vec<(i64, GradedVector)> = match sector {
        Sector::Untwisted => vec![(0, GradedVector::basis(a.clone()))],
        Sector::Twisted { .. } => delta_exponential(form, &GradedVector::basis(a.clone())),
    };
    for (k, ak) in pieces {
        let ke = Exponent::int(k);
        for (am, ac) in ak.terms() {
            for (p, w) in normal_ordered(form, sector, am, v, max_power + ke) {
                series_add(&mut out, p - ke, &w, ac);
            }
        }
    }
    out
}
