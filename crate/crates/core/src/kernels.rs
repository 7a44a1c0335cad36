//! The kernel functions `F_{n,i}` on the twisted projective line.
//!
//! For `n` in `(1/T)Z` and `i >= 0`,
//!
//! ```text
//!     F_{n,i}(z, w) = z^{-n} / i! * d^i/dw^i ( w^n / (z - w) ).
//! ```
//!
//! These drive the recursive construction of correlation functions.  This
//! module materializes them as exact [`MultiPointFunction`] values, provides
//! their closed-form expansions at the three special points, and checks the
//! residue sum formula on the `T`-fold cover of the projective line.

use num_traits::Zero;
use rand::Rng;

use crate::exponent::Exponent;
use crate::mpf::MultiPointFunction;
use crate::poly::Poly;
use crate::rational::{binomial_coeff, factorial, Rational};
use crate::report::CheckReport;
use crate::series::{ExpansionSite, PuiseuxSeries, SeriesError, Window};

/// Index `(n, i)` of a kernel `F_{n,i}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct KernelIndex {
    /// The exponent `n`, an element of `(1/T)Z`.
    pub n: Exponent,
    /// The derivative order `i`.
    pub i: u32,
}

impl KernelIndex {
    /// Builds the index `(n, i)`.
    pub fn new(n: Exponent, i: u32) -> Self {
        KernelIndex { n, i }
    }
}

fn zw() -> Vec<String> {
    vec!["z".into(), "w".into()]
}

/// `F_{n,i}(z, w)` in the variables `z`, `w`, built by symbolic differentiation.
///
/// ```
/// use voatwist::kernels::{f_kernel, KernelIndex};
/// use voatwist::exponent::Exponent;
/// use voatwist::mpf::MultiPointFunction;
/// let f = f_kernel(KernelIndex::new(Exponent::int(1), 1));
/// let expected = MultiPointFunction::diagonal_pole(f.vars().to_vec(), "z", "w", 2);
/// assert!(f.rational_equal(&expected));
/// ```
pub fn f_kernel(idx: KernelIndex) -> MultiPointFunction {
    let mut f = MultiPointFunction::var_pow(zw(), "w", idx.n).mul(&MultiPointFunction::diagonal_pole(zw(), "z", "w", 1));
    for _ in 0..idx.i {
        f = f.derivative("w");
    }
    f.scale(&factorial(idx.i).recip()).shift_var("z", -idx.n)
}

/// `F_{n,i}` evaluated at `(z, w) = (vars[a], vars[b])` inside a larger variable list.
pub fn f_kernel_between(n: Exponent, i: u32, vars: &[String], a: &str, b: &str) -> MultiPointFunction {
    let f = kernel_closed_form(n, i);
    let g = f.renamed(vec![a.to_string(), b.to_string()]);
    g.embed(vars)
}

/// `F_{n,i}` from its closed form `z^{-n} sum_{k=0}^{i} binom(n, i-k) w^{n-i+k} / (z-w)^{k+1}`.
pub fn kernel_closed_form(n: Exponent, i: u32) -> MultiPointFunction {
    let nq = n.to_rational();
    let mut acc = MultiPointFunction::zero(zw());
    for k in 0..=i {
        let c = binomial_coeff(&nq, i - k);
        if c.is_zero() {
            continue;
        }
        let term = MultiPointFunction::new(
            zw(),
            Poly::monomial(2, vec![-n, n - Exponent::int((i - k) as i64)], c),
            [((0, 1), k + 1)],
        );
        acc = acc.add(&term);
    }
    acc
}

/// Closed-form expansion of `F_{n,i}` at a site in `z` (`at_zero`, `at_infinity`,
/// or `at_diagonal` with base `w`).
pub fn f_kernel_expansion(idx: KernelIndex, site: &ExpansionSite, trunc: Exponent) -> Result<PuiseuxSeries<MultiPointFunction>, SeriesError> {
    let KernelIndex { n, i } = idx;
    if site.variable() != "z" {
        return Err(SeriesError::UnsupportedShape("kernel expansions are in z".into()));
    }
    let wv = vec!["w".to_string()];
    let wpow = |e: Exponent, c: Rational| MultiPointFunction::monomial(wv.clone(), vec![e], c);
    let nq = n.to_rational();
    let mut out;
    match site {
        ExpansionSite::AtZero(_) => {
            out = PuiseuxSeries::new(site.local_coordinate(), [], Window::Below(trunc));
            let mut j = 0i64;
            while Exponent::int(j) - n <= trunc {
                let c = -binomial_coeff(&(&nq - Rational::from_integer((j + 1).into())), i);
                out.add_term(Exponent::int(j) - n, wpow(n - Exponent::int(j + i as i64 + 1), c));
                j += 1;
            }
        }
        ExpansionSite::AtInfinity(_) => {
            out = PuiseuxSeries::new(site.local_coordinate(), [], Window::Above(trunc));
            let mut j = 0i64;
            while -n - Exponent::int(j + 1) >= trunc {
                let c = binomial_coeff(&(&nq + Rational::from_integer(j.into())), i);
                out.add_term(-n - Exponent::int(j + 1), wpow(n + Exponent::int(j - i as i64), c));
                j += 1;
            }
        }
        ExpansionSite::AtDiagonal(_, base) => {
            if base != "w" {
                return Err(SeriesError::UnsupportedShape("kernel diagonal is z = w".into()));
            }
            out = PuiseuxSeries::new(site.local_coordinate(), [], Window::Below(trunc));
            let top = trunc.floor();
            for l in 0..=i as i64 {
                let mut p = 0i64;
                while p - l - 1 <= top {
                    let c = binomial_coeff(&nq, (i as i64 - l) as u32) * binomial_coeff(&-nq.clone(), p as u32);
                    out.add_term(Exponent::int(p - l - 1), wpow(Exponent::int(-(i as i64) + l - p), c));
                    p += 1;
                }
            }
        }
    }
    Ok(out)
}

/// `F_{n,i} - F_{n+1,i} - binom(n, i) z^{-n-1} w^{n-i}`, which vanishes identically.
pub fn kernel_recurrence_defect(n: Exponent, i: u32) -> MultiPointFunction {
    let a = f_kernel(KernelIndex::new(n, i));
    let b = f_kernel(KernelIndex::new(n + Exponent::int(1), i));
    let c = MultiPointFunction::monomial(zw(), vec![-n - Exponent::int(1), n - Exponent::int(i as i64)], binomial_coeff(&n.to_rational(), i));
    a.sub(&b).sub(&c)
}

/// `(1/T) Res_{p=0} + (1/T) Res_{p=inf} + Res_{p=q}` of `z^{r/T} f dz`, as a series in `w`.
///
/// The three terms are computed from the formal expansions: the first two are
/// `Res_z` of the expansions at `0` and `infinity` (with the sign relating the
/// curve residue at infinity to the formal residue), the last is the `(z-w)^{-1}`
/// coefficient of the diagonal expansion.  The result vanishes for every `f`
/// of the two-point shape.
pub fn residue_sum(f: &MultiPointFunction, r: u32, t: u32, trunc: Exponent) -> Result<PuiseuxSeries<Rational>, SeriesError> {
    if f.vars() != zw().as_slice() {
        return Err(SeriesError::UnsupportedShape("residue_sum expects variables (z, w)".into()));
    }
    let g = f.shift_var("z", Exponent::new(r as i64, t as i64));
    for (m, _) in g.numerator().terms() {
        if !m[0].is_integer() {
            return Err(SeriesError::NotSingleValued(m[0]));
        }
    }
    let at0 = g.residue_at(&ExpansionSite::AtZero("z".into()))?;
    let atinf = g.residue_at(&ExpansionSite::AtInfinity("z".into()))?;
    let atq = g.residue_at(&ExpansionSite::AtDiagonal("z".into(), "w".into()))?;
    let total = at0.sub(&atinf).add(&atq);
    let mut out = PuiseuxSeries::new("w", [], Window::Below(trunc));
    if !total.diagonal_poles().is_empty() {
        return Err(SeriesError::UnsupportedShape("residue is not a Laurent polynomial".into()));
    }
    for (m, c) in total.numerator().terms() {
        if m[0] <= trunc {
            out.add_term(m[0], c.clone());
        }
    }
    Ok(out)
}

/// A random function of the two-point shape `g(z, w^{1/T}) / (z^{r/T} z^m w^{n/T} (z-w)^l)`.
///
/// Returns the function together with its twist index `r`.
pub fn random_two_point<R: Rng>(rng: &mut R, t: u32) -> (MultiPointFunction, u32) {
    let r = rng.gen_range(0..t);
    let m = rng.gen_range(0..3i64);
    let nn = rng.gen_range(0..(3 * t as i64));
    let l = rng.gen_range(0..4u32);
    let mut g = Poly::zero(2);
    for _ in 0..rng.gen_range(1..5) {
        let a = rng.gen_range(0..4i64);
        let b = rng.gen_range(0..(3 * t as i64));
        let c = Rational::new(rng.gen_range(-5..=5i64).into(), rng.gen_range(1..=4i64).into());
        g.add_term(vec![Exponent::int(a), Exponent::new(b, t as i64)], c);
    }
    let shift = vec![-Exponent::new(r as i64, t as i64) - Exponent::int(m), -Exponent::new(nn, t as i64)];
    (MultiPointFunction::new(zw(), g.shift(&shift), [((0, 1), l)]), r)
}

/// The three expansion sites of `F_{n,i}` with the truncation that keeps
/// `depth` terms at each.
pub fn kernel_sites(idx: KernelIndex, depth: i64) -> [(ExpansionSite, Exponent); 3] {
    let n = idx.n;
    [
        (ExpansionSite::AtZero("z".into()), -n + Exponent::int(depth - 1)),
        (ExpansionSite::AtInfinity("z".into()), -n - Exponent::int(depth)),
        (ExpansionSite::AtDiagonal("z".into(), "w".into()), Exponent::int(depth - idx.i as i64 - 2)),
    ]
}

/// Checks the three closed-form kernel expansions against the generic expander.
pub fn kernel_expansions_agree(idx: KernelIndex, depth: i64) -> Result<bool, SeriesError> {
    let f = f_kernel(idx);
    let n = idx.n;
    for (site, trunc) in kernel_sites(idx, depth) {
        let closed = f_kernel_expansion(idx, &site, trunc)?;
        let generic = f.expand(&site, trunc)?;
        if !closed.agrees_with(&generic) || closed.window() != generic.window() {
            return Ok(false);
        }
    }
    let cf = kernel_closed_form(n, idx.i);
    Ok(cf.rational_equal(&f))
}

/// Recurrence and expansion checks for every `n` in `(1/t)Z` with `|n| <= max_n`
/// and every `i <= max_i`, with `depth` terms per expansion.
pub fn kernel_suite(t: u32, max_n: Exponent, max_i: u32, depth: i64) -> Result<Vec<CheckReport>, SeriesError> {
    let mut recurrence = CheckReport::new("recurrence");
    let mut expansions = CheckReport::new("expansions");
    let t = t as i64;
    let top = (max_n.to_rational() * Rational::from_integer(t.into())).floor().to_integer();
    let top: i64 = top.try_into().unwrap_or(i64::MAX);
    for num in -top..=top {
        let n = Exponent::new(num, t);
        for i in 0..=max_i {
            recurrence.record(kernel_recurrence_defect(n, i).is_zero());
            expansions.record(kernel_expansions_agree(KernelIndex::new(n, i), depth)?);
        }
    }
    Ok(vec![recurrence, expansions])
}

/// Evaluates [`residue_sum`] on `count` random two-point functions.
pub fn residue_suite<R: Rng>(rng: &mut R, t: u32, count: usize, trunc: Exponent) -> Result<CheckReport, SeriesError> {
    let mut rep = CheckReport::new("residue_sum");
    for _ in 0..count {
        let (f, r) = random_two_point(rng, t);
        rep.record(residue_sum(&f, r, t, trunc)?.is_zero());
    }
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn recurrence_defect_vanishes() {
        for num in -4..=4 {
            for i in 0..=4 {
                assert!(kernel_recurrence_defect(Exponent::new(num, 2), i).is_zero());
            }
        }
    }

    #[test]
    fn expansions_match_generic_expander() {
        for num in -4..=4 {
            for i in 0..=4 {
                assert!(kernel_expansions_agree(KernelIndex::new(Exponent::new(num, 2), i), 12).unwrap());
            }
        }
    }

    #[test]
    fn residue_sum_vanishes_on_random_functions() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let (f, r) = random_two_point(&mut rng, 2);
            let s = residue_sum(&f, r, 2, Exponent::int(10)).unwrap();
            assert!(s.is_zero(), "{}", f);
        }
    }
}
