//! Sparse multivariate Laurent polynomials with rational exponents.
//!
//! A [`Poly`] in `n` variables is a finite sum of terms `c * x_0^{e_0} ... x_{n-1}^{e_{n-1}}`
//! where each `e_k` is an [`Exponent`] (possibly negative or fractional) and `c`
//! is a nonzero [`Rational`].  These are the numerators of
//! [`MultiPointFunction`](crate::mpf::MultiPointFunction) values.

use num_traits::{One, Zero};
use std::collections::BTreeMap;
use std::fmt;

use crate::exponent::Exponent;
use crate::rational::{binomial_coeff, fmt_q, Rational};

/// Exponent vector of a monomial.
pub type Monomial = Vec<Exponent>;

/// Sparse Laurent-Puiseux polynomial over the rationals.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Poly {
    nvars: usize,
    terms: BTreeMap<Monomial, Rational>,
}

impl Poly {
    /// The zero polynomial in `nvars` variables.
    pub fn zero(nvars: usize) -> Self {
        Poly { nvars, terms: BTreeMap::new() }
    }

    /// The constant `c`.
    pub fn constant(nvars: usize, c: Rational) -> Self {
        Poly::monomial(nvars, vec![Exponent::zero(); nvars], c)
    }

    /// The constant one.
    pub fn one(nvars: usize) -> Self {
        Poly::constant(nvars, Rational::one())
    }

    /// A single term `c * x^e`.
    ///
    /// # Panics
    ///
    /// Panics when `e.len() != nvars`.
    pub fn monomial(nvars: usize, e: Monomial, c: Rational) -> Self {
        assert_eq!(e.len(), nvars, "exponent vector length");
        let mut p = Poly::zero(nvars);
        if !c.is_zero() {
            p.terms.insert(e, c);
        }
        p
    }

    /// The variable power `x_k^e` with coefficient one.
    pub fn var_pow(nvars: usize, k: usize, e: Exponent) -> Self {
        let mut m = vec![Exponent::zero(); nvars];
        m[k] = e;
        Poly::monomial(nvars, m, Rational::one())
    }

    /// The binomial `x_i - x_j`.
    pub fn diff(nvars: usize, i: usize, j: usize) -> Self {
        Poly::var_pow(nvars, i, Exponent::int(1)) - Poly::var_pow(nvars, j, Exponent::int(1))
    }

    /// Number of variables.
    pub fn nvars(&self) -> usize {
        self.nvars
    }

    /// Iterator over `(exponents, coefficient)` pairs in monomial order.
    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    /// Number of nonzero terms.
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    /// True when there are no terms.
    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// True for the zero polynomial.
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// True when the polynomial is a constant (including zero).
    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|m| m.iter().all(Exponent::is_zero))
    }

    /// Coefficient of the given monomial.
    pub fn coeff(&self, m: &Monomial) -> Rational {
        self.terms.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    /// Adds `c * x^m` in place.
    pub fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    /// Multiplies every coefficient by `c`.
    pub fn scale(&self, c: &Rational) -> Poly {
        if c.is_zero() {
            return Poly::zero(self.nvars);
        }
        Poly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(m, x)| (m.clone(), x * c)).collect(),
        }
    }

    /// Multiplies by the monomial `x^e`.
    pub fn shift(&self, e: &[Exponent]) -> Poly {
        Poly {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(m, x)| (m.iter().zip(e).map(|(a, b)| *a + *b).collect(), x.clone()))
                .collect(),
        }
    }

    /// Nonnegative integer power.
    pub fn pow(&self, k: u32) -> Poly {
        let mut acc = Poly::one(self.nvars);
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    /// Partial derivative with respect to `x_k`.
    pub fn derivative(&self, k: usize) -> Poly {
        let mut out = Poly::zero(self.nvars);
        for (m, c) in &self.terms {
            let e = m[k];
            if e.is_zero() {
                continue;
            }
            let mut m2 = m.clone();
            m2[k] = e - Exponent::int(1);
            out.add_term(m2, c * e.to_rational());
        }
        out
    }

    /// Minimal exponent of `x_k` over all terms, or `None` for zero.
    pub fn min_exponent(&self, k: usize) -> Option<Exponent> {
        self.terms.keys().map(|m| m[k]).min()
    }

    /// Maximal exponent of `x_k` over all terms, or `None` for zero.
    pub fn max_exponent(&self, k: usize) -> Option<Exponent> {
        self.terms.keys().map(|m| m[k]).max()
    }

    /// True when `x_k` does not occur.
    pub fn free_of(&self, k: usize) -> bool {
        self.terms.keys().all(|m| m[k].is_zero())
    }

    /// Drops variable `k`, which must not occur.
    ///
    /// # Panics
    ///
    /// Panics when `x_k` occurs with a nonzero exponent.
    pub fn remove_var(&self, k: usize) -> Poly {
        assert!(self.free_of(k), "variable still occurs");
        Poly {
            nvars: self.nvars - 1,
            terms: self
                .terms
                .iter()
                .map(|(m, c)| {
                    let mut m2 = m.clone();
                    m2.remove(k);
                    (m2, c.clone())
                })
                .collect(),
        }
    }

    /// Inserts a fresh variable at position `k` (exponent zero everywhere).
    pub fn insert_var(&self, k: usize) -> Poly {
        Poly {
            nvars: self.nvars + 1,
            terms: self
                .terms
                .iter()
                .map(|(m, c)| {
                    let mut m2 = m.clone();
                    m2.insert(k, Exponent::zero());
                    (m2, c.clone())
                })
                .collect(),
        }
    }

    /// Splits off the exponent of `x_k`: returns `e -> coefficient polynomial`
    /// with `x_k` set to exponent zero in each coefficient.
    pub fn collect_var(&self, k: usize) -> BTreeMap<Exponent, Poly> {
        let mut out: BTreeMap<Exponent, Poly> = BTreeMap::new();
        for (m, c) in &self.terms {
            let mut m2 = m.clone();
            let e = std::mem::replace(&mut m2[k], Exponent::zero());
            out.entry(e).or_insert_with(|| Poly::zero(self.nvars)).add_term(m2, c.clone());
        }
        out
    }

    /// Exact division by `x_i - x_j`, or `None` when it does not divide.
    ///
    /// Terms are grouped by the fractional parts of the two exponents, the
    /// total degree in `x_i, x_j`, and the remaining exponents.  Within a group
    /// the polynomial is `x_i^a x_j^b` times a Laurent polynomial in
    /// `x_i / x_j`, which is divisible by `x_i - x_j` exactly when its
    /// coefficients sum to zero.
    pub fn div_diff(&self, i: usize, j: usize) -> Option<Poly> {
        type Key = (Exponent, Exponent, Exponent, Vec<Exponent>);
        let mut groups: BTreeMap<Key, BTreeMap<i64, Rational>> = BTreeMap::new();
        for (m, c) in &self.terms {
            let (a, b) = (m[i], m[j]);
            let rest: Vec<Exponent> = m
                .iter()
                .enumerate()
                .filter(|(k, _)| *k != i && *k != j)
                .map(|(_, e)| *e)
                .collect();
            let key = (a.frac(), b.frac(), a + b, rest);
            groups.entry(key).or_default().insert(a.floor(), c.clone());
        }
        let mut out = Poly::zero(self.nvars);
        for ((fa, _fb, s, rest), coeffs) in groups {
            let mut acc = Rational::zero();
            let kmin = *coeffs.keys().next().unwrap();
            let kmax = *coeffs.keys().next_back().unwrap();
            for k in kmin..=kmax {
                if let Some(p) = coeffs.get(&k) {
                    acc -= p;
                }
                if k == kmax {
                    if !acc.is_zero() {
                        return None;
                    }
                } else if !acc.is_zero() {
                    let a = fa + Exponent::int(k);
                    let b = s - Exponent::int(1) - a;
                    let mut m = Vec::with_capacity(self.nvars);
                    let mut it = rest.iter();
                    for idx in 0..self.nvars {
                        if idx == i {
                            m.push(a);
                        } else if idx == j {
                            m.push(b);
                        } else {
                            m.push(*it.next().unwrap());
                        }
                    }
                    out.add_term(m, acc.clone());
                }
            }
        }
        Some(out)
    }

    /// Replaces `x_k^e` by `(x_base + t)^e` expanded in powers of `t` up to
    /// `t^order`, returning `power of t -> coefficient polynomial` with `x_k`
    /// eliminated (exponent zero).
    pub fn shift_expand(&self, k: usize, base: usize, order: i64) -> BTreeMap<i64, Poly> {
        let mut out: BTreeMap<i64, Poly> = BTreeMap::new();
        if order < 0 {
            return out;
        }
        for (m, c) in &self.terms {
            let e = m[k];
            let top = if e.is_integer() && !e.is_negative() { e.numer().min(order) } else { order };
            for p in 0..=top {
                let b = binomial_coeff(&e.to_rational(), p as u32);
                if b.is_zero() {
                    continue;
                }
                let mut m2 = m.clone();
                m2[k] = Exponent::zero();
                m2[base] = m2[base] + e - Exponent::int(p);
                out.entry(p).or_insert_with(|| Poly::zero(self.nvars)).add_term(m2, c * &b);
            }
        }
        out.retain(|_, p| !p.is_zero());
        out
    }

    /// Renders the polynomial with the given variable names.
    pub fn render(&self, names: &[String]) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut parts = Vec::new();
        for (m, c) in &self.terms {
            let mono: Vec<String> = m
                .iter()
                .zip(names)
                .filter(|(e, _)| !e.is_zero())
                .map(|(e, n)| if *e == Exponent::int(1) { n.clone() } else { format!("{n}^({e})") })
                .collect();
            if mono.is_empty() {
                parts.push(fmt_q(c));
            } else if c.is_one() {
                parts.push(mono.join("*"));
            } else if *c == -Rational::one() {
                parts.push(format!("-{}", mono.join("*")));
            } else {
                parts.push(format!("{}*{}", fmt_q(c), mono.join("*")));
            }
        }
        parts.join(" + ").replace("+ -", "- ")
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<String> = (0..self.nvars).map(|k| format!("x{k}")).collect();
        f.write_str(&self.render(&names))
    }
}

impl std::ops::Add for &Poly {
    type Output = Poly;
    fn add(self, o: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &o.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }
}

impl std::ops::Sub for &Poly {
    type Output = Poly;
    fn sub(self, o: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &o.terms {
            out.add_term(m.clone(), -c.clone());
        }
        out
    }
}

impl std::ops::Mul for &Poly {
    type Output = Poly;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn mul(self, o: &Poly) -> Poly {
        let mut out = Poly::zero(self.nvars);
        for (m1, c1) in &self.terms {
            for (m2, c2) in &o.terms {
                let m: Monomial = m1.iter().zip(m2).map(|(a, b)| *a + *b).collect();
                out.add_term(m, c1 * c2);
            }
        }
        out
    }
}

impl std::ops::Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        self.scale(&-Rational::one())
    }
}

impl std::ops::Add for Poly {
    type Output = Poly;
    fn add(self, o: Poly) -> Poly {
        &self + &o
    }
}

impl std::ops::Sub for Poly {
    type Output = Poly;
    fn sub(self, o: Poly) -> Poly {
        &self - &o
    }
}

impl std::ops::Mul for Poly {
    type Output = Poly;
    fn mul(self, o: Poly) -> Poly {
        &self * &o
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{q, qi};

    fn x(k: usize) -> Poly {
        Poly::var_pow(2, k, Exponent::int(1))
    }

    #[test]
    fn division_by_difference() {
        let d = Poly::diff(2, 0, 1);
        let p = &(&x(0) * &x(0)) - &(&x(1) * &x(1));
        let quo = p.div_diff(0, 1).unwrap();
        assert_eq!(quo, &x(0) + &x(1));
        assert!(x(0).div_diff(0, 1).is_none());
        let half = Poly::var_pow(2, 0, Exponent::new(1, 2)).shift(&[Exponent::zero(), Exponent::new(-3, 2)]);
        let prod = &half * &d.pow(3);
        let back = prod.div_diff(0, 1).unwrap().div_diff(0, 1).unwrap().div_diff(0, 1).unwrap();
        assert_eq!(back, half);
        assert!(back.div_diff(0, 1).is_none());
    }

    #[test]
    fn shift_expansion_of_square_root() {
        let p = Poly::var_pow(2, 0, Exponent::new(1, 2));
        let e = p.shift_expand(0, 1, 2);
        assert_eq!(e[&0], Poly::var_pow(2, 1, Exponent::new(1, 2)));
        assert_eq!(e[&1], Poly::var_pow(2, 1, Exponent::new(-1, 2)).scale(&q(1, 2)));
        assert_eq!(e[&2], Poly::var_pow(2, 1, Exponent::new(-3, 2)).scale(&q(-1, 8)));
    }

    #[test]
    fn derivative_of_fractional_power() {
        let p = Poly::var_pow(2, 0, Exponent::new(3, 2)).scale(&qi(2));
        assert_eq!(p.derivative(0), Poly::var_pow(2, 0, Exponent::new(1, 2)).scale(&qi(3)));
        assert!(p.derivative(1).is_zero());
    }
}
