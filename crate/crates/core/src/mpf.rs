//! Rational functions on powers of the twisted projective line.
//!
//! A [`MultiPointFunction`] in variables `x_0, ..., x_{n-1}` is
//!
//! ```text
//!     N(x) / prod_{i<j} (x_i - x_j)^{l_ij}
//! ```
//!
//! where `N` is a Laurent polynomial with rational exponents ([`Poly`]).
//! Powers of single variables (poles at `0` and fractional prefactors) live in
//! `N`; only the diagonal divisors are kept as explicit pole orders.  Values are
//! kept reduced: no `x_i - x_j` with positive pole order divides `N`.

use num_traits::{One, Zero};
use std::collections::BTreeMap;
use serde_json::{json, Value};
use std::fmt;

use crate::exponent::Exponent;
use crate::poly::Poly;
use crate::rational::{binomial_coeff, fmt_q, parse_q, Rational};
use crate::series::{Coefficient, ExpansionSite, PuiseuxSeries, SeriesError, Window};

/// Rational function `N / prod (x_i - x_j)^{l_ij}` in named variables.
#[derive(Clone, Debug)]
pub struct MultiPointFunction {
    vars: Vec<String>,
    num: Poly,
    poles: BTreeMap<(usize, usize), u32>,
}

impl MultiPointFunction {
    /// Builds and reduces `num / prod (x_i - x_j)^{l}` for the given pole orders.
    ///
    /// Pairs may be given in either order; `(j, i)` with `j > i` contributes
    /// `(x_j - x_i)^{-l} = (-1)^l (x_i - x_j)^{-l}`.
    pub fn new(vars: Vec<String>, num: Poly, poles: impl IntoIterator<Item = ((usize, usize), u32)>) -> Self {
        assert_eq!(vars.len(), num.nvars(), "variable count");
        let mut sign = Rational::one();
        let mut map: BTreeMap<(usize, usize), u32> = BTreeMap::new();
        for ((i, j), l) in poles {
            assert_ne!(i, j, "diagonal pole needs two distinct variables");
            let key = if i < j { (i, j) } else { (j, i) };
            if i > j && l % 2 == 1 {
                sign = -sign;
            }
            *map.entry(key).or_default() += l;
        }
        let mut f = MultiPointFunction { vars, num: num.scale(&sign), poles: map };
        f.reduce();
        f
    }

    /// The polynomial `num` viewed as a function.
    pub fn from_poly(vars: Vec<String>, num: Poly) -> Self {
        MultiPointFunction::new(vars, num, [])
    }

    /// The constant `c`.
    pub fn constant(vars: Vec<String>, c: Rational) -> Self {
        let n = vars.len();
        MultiPointFunction::from_poly(vars, Poly::constant(n, c))
    }

    /// The zero function.
    pub fn zero(vars: Vec<String>) -> Self {
        let n = vars.len();
        MultiPointFunction::from_poly(vars, Poly::zero(n))
    }

    /// `c * prod x_k^{e_k}`.
    pub fn monomial(vars: Vec<String>, e: Vec<Exponent>, c: Rational) -> Self {
        let n = vars.len();
        MultiPointFunction::from_poly(vars, Poly::monomial(n, e, c))
    }

    /// `x_k^e` for the variable named `name`.
    ///
    /// # Panics
    ///
    /// Panics when `name` is not a variable.
    pub fn var_pow(vars: Vec<String>, name: &str, e: Exponent) -> Self {
        let n = vars.len();
        let k = vars.iter().position(|v| v == name).expect("unknown variable");
        MultiPointFunction::from_poly(vars, Poly::var_pow(n, k, e))
    }

    /// `(x_i - x_j)^{-l}` for named variables.
    pub fn diagonal_pole(vars: Vec<String>, a: &str, b: &str, l: u32) -> Self {
        let n = vars.len();
        let i = vars.iter().position(|v| v == a).expect("unknown variable");
        let j = vars.iter().position(|v| v == b).expect("unknown variable");
        MultiPointFunction::new(vars, Poly::one(n), [((i, j), l)])
    }

    /// Variable names.
    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    /// Index of a named variable.
    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|v| v == name)
    }

    /// Reduced numerator.
    pub fn numerator(&self) -> &Poly {
        &self.num
    }

    /// Diagonal pole orders keyed by `(i, j)` with `i < j`.
    pub fn diagonal_poles(&self) -> &BTreeMap<(usize, usize), u32> {
        &self.poles
    }

    /// Pole order along `x_i = x_j`.
    pub fn pole_order(&self, i: usize, j: usize) -> u32 {
        let key = if i < j { (i, j) } else { (j, i) };
        self.poles.get(&key).copied().unwrap_or(0)
    }

    /// Order of the pole at `x_k = 0` (integer part of the most negative exponent).
    pub fn pole_order_at_zero(&self, k: usize) -> u32 {
        match self.num.min_exponent(k) {
            Some(e) if e.is_negative() => (-e).floor() as u32,
            _ => 0,
        }
    }

    /// The common fractional part of the exponents of `x_k`, if all terms share one.
    pub fn prefactor_exponent(&self, k: usize) -> Option<Exponent> {
        let mut fr = None;
        for (m, _) in self.num.terms() {
            let f = m[k].frac();
            match fr {
                None => fr = Some(f),
                Some(g) if g != f => return None,
                _ => {}
            }
        }
        Some(fr.unwrap_or_else(Exponent::zero))
    }

    /// True for the zero function.
    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    fn reduce(&mut self) {
        if self.num.is_zero() {
            self.poles.clear();
            return;
        }
        let keys: Vec<(usize, usize)> = self.poles.keys().copied().collect();
        for (i, j) in keys {
            while self.poles[&(i, j)] > 0 {
                match self.num.div_diff(i, j) {
                    Some(q) => {
                        self.num = q;
                        *self.poles.get_mut(&(i, j)).unwrap() -= 1;
                    }
                    None => break,
                }
            }
        }
        self.poles.retain(|_, l| *l > 0);
    }

    fn same_vars(&self, o: &Self) {
        assert_eq!(self.vars, o.vars, "functions must share variables");
    }

    /// Numerator after raising the pole orders to `target`.
    fn numerator_over(&self, target: &BTreeMap<(usize, usize), u32>) -> Poly {
        let n = self.vars.len();
        let mut num = self.num.clone();
        for (&(i, j), &l) in target {
            let extra = l - self.pole_order(i, j);
            if extra > 0 {
                num = &num * &Poly::diff(n, i, j).pow(extra);
            }
        }
        num
    }

    fn common_poles(&self, o: &Self) -> BTreeMap<(usize, usize), u32> {
        let mut t = self.poles.clone();
        for (k, &l) in &o.poles {
            let e = t.entry(*k).or_default();
            *e = (*e).max(l);
        }
        t
    }

    /// Sum.
    pub fn add(&self, o: &Self) -> Self {
        self.same_vars(o);
        let t = self.common_poles(o);
        let num = &self.numerator_over(&t) + &o.numerator_over(&t);
        MultiPointFunction::new(self.vars.clone(), num, t)
    }

    /// Difference.
    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    /// Negation.
    pub fn neg(&self) -> Self {
        self.scale(&-Rational::one())
    }

    /// Product.
    pub fn mul(&self, o: &Self) -> Self {
        self.same_vars(o);
        let mut poles = self.poles.clone();
        for (k, &l) in &o.poles {
            *poles.entry(*k).or_default() += l;
        }
        MultiPointFunction::new(self.vars.clone(), &self.num * &o.num, poles)
    }

    /// Multiplication by a scalar.
    pub fn scale(&self, c: &Rational) -> Self {
        MultiPointFunction { vars: self.vars.clone(), num: self.num.scale(c), poles: if c.is_zero() { BTreeMap::new() } else { self.poles.clone() } }
    }

    /// Multiplication by the monomial `prod x_k^{e_k}`.
    pub fn shift(&self, e: &[Exponent]) -> Self {
        MultiPointFunction { vars: self.vars.clone(), num: self.num.shift(e), poles: self.poles.clone() }
    }

    /// Multiplication by `x^e` for a named variable.
    pub fn shift_var(&self, name: &str, e: Exponent) -> Self {
        let k = self.var_index(name).expect("unknown variable");
        let mut v = vec![Exponent::zero(); self.vars.len()];
        v[k] = e;
        self.shift(&v)
    }

    /// Partial derivative with respect to the named variable.
    pub fn derivative(&self, name: &str) -> Self {
        let k = self.var_index(name).expect("unknown variable");
        let n = self.vars.len();
        // d(N / D) = N' / D - N * sum_{pairs} l * d(x_i - x_j) / (x_i - x_j) / D
        let mut poles = self.poles.clone();
        let involved: Vec<((usize, usize), u32)> = self.poles.iter().filter(|((i, j), _)| *i == k || *j == k).map(|(p, l)| (*p, *l)).collect();
        for (p, _) in &involved {
            *poles.get_mut(p).unwrap() += 1;
        }
        let mut num = self.num.derivative(k);
        for (p, _) in &involved {
            num = &num * &Poly::diff(n, p.0, p.1);
        }
        for (idx, ((i, _), l)) in involved.iter().enumerate() {
            let sign = if *i == k { -Rational::one() } else { Rational::one() };
            let mut term = self.num.scale(&(sign * Rational::from_integer((*l).into())));
            for (jdx, (p, _)) in involved.iter().enumerate() {
                if jdx != idx {
                    term = &term * &Poly::diff(n, p.0, p.1);
                }
            }
            num = &num + &term;
        }
        MultiPointFunction::new(self.vars.clone(), num, poles)
    }

    /// Exact equality as rational functions (cross multiplication).
    ///
    /// ```
    /// use voatwist::mpf::MultiPointFunction;
    /// let vars = vec!["z".to_string(), "w".to_string()];
    /// let f = MultiPointFunction::diagonal_pole(vars.clone(), "z", "w", 1);
    /// let g = MultiPointFunction::diagonal_pole(vars, "w", "z", 1);
    /// assert!(!f.rational_equal(&g));
    /// assert!(f.rational_equal(&g.neg()));
    /// ```
    pub fn rational_equal(&self, o: &Self) -> bool {
        if self.vars != o.vars {
            return false;
        }
        let t = self.common_poles(o);
        self.numerator_over(&t) == o.numerator_over(&t)
    }

    /// Drops a variable that does not occur.
    pub fn remove_var(&self, name: &str) -> Self {
        let k = self.var_index(name).expect("unknown variable");
        assert!(self.poles.keys().all(|(i, j)| *i != k && *j != k), "variable still in a pole");
        let mut vars = self.vars.clone();
        vars.remove(k);
        let remap = |x: usize| if x > k { x - 1 } else { x };
        MultiPointFunction {
            vars,
            num: self.num.remove_var(k),
            poles: self.poles.iter().map(|((i, j), l)| ((remap(*i), remap(*j)), *l)).collect(),
        }
    }

    /// Embeds into a larger variable list (by name).
    pub fn embed(&self, vars: &[String]) -> Self {
        let pos: Vec<usize> = self.vars.iter().map(|v| vars.iter().position(|u| u == v).expect("missing variable")).collect();
        let mut num = Poly::zero(vars.len());
        for (m, c) in self.num.terms() {
            let mut e = vec![Exponent::zero(); vars.len()];
            for (k, x) in m.iter().enumerate() {
                e[pos[k]] = *x;
            }
            num.add_term(e, c.clone());
        }
        let poles: Vec<((usize, usize), u32)> = self.poles.iter().map(|((i, j), l)| ((pos[*i], pos[*j]), *l)).collect();
        MultiPointFunction::new(vars.to_vec(), num, poles)
    }

    /// Renames variables (same order).
    pub fn renamed(&self, vars: Vec<String>) -> Self {
        assert_eq!(vars.len(), self.vars.len());
        MultiPointFunction { vars, num: self.num.clone(), poles: self.poles.clone() }
    }

    /// If the function is a constant, returns it.
    pub fn as_constant(&self) -> Option<Rational> {
        if self.poles.is_empty() && self.num.is_constant() {
            Some(self.num.coeff(&vec![Exponent::zero(); self.vars.len()]))
        } else {
            None
        }
    }

    /// Expansion at a site, with coefficients in the remaining variables.
    ///
    /// `trunc` bounds the exponents kept in the direction of the expansion:
    /// at zero and at a diagonal the result is exact for exponents `<= trunc`;
    /// at infinity it is exact for exponents `>= trunc`.
    pub fn expand(&self, site: &ExpansionSite, trunc: Exponent) -> Result<PuiseuxSeries<MultiPointFunction>, SeriesError> {
        let k = self
            .var_index(site.variable())
            .ok_or_else(|| SeriesError::UnsupportedShape(format!("no variable {}", site.variable())))?;
        let n = self.vars.len();
        let coeff = |p: Poly, poles: &BTreeMap<(usize, usize), u32>| -> MultiPointFunction {
            MultiPointFunction::new(self.vars.clone(), p, poles.iter().map(|(a, b)| (*a, *b))).remove_var(site.variable())
        };
        let other_poles: BTreeMap<(usize, usize), u32> = self.poles.iter().filter(|((i, j), _)| *i != k && *j != k).map(|(a, b)| (*a, *b)).collect();
        // Factors (x_k - y)^{-l} with an overall sign for stored (y, x_k) pairs.
        let mut sign = Rational::one();
        let mut factors: Vec<(usize, u32)> = Vec::new();
        for (&(i, j), &l) in &self.poles {
            if i == k {
                factors.push((j, l));
            } else if j == k {
                factors.push((i, l));
                if l % 2 == 1 {
                    sign = -sign;
                }
            }
        }
        let num = self.num.scale(&sign);
        match site {
            ExpansionSite::AtZero(_) => {
                let cols = num.collect_var(k);
                let Some(vmin) = cols.keys().next().copied() else {
                    return Ok(PuiseuxSeries::new(site.local_coordinate(), [], Window::Below(trunc)));
                };
                let depth = (trunc - vmin).floor();
                // (x_k - y)^{-l} = sum_i binom(-l, i) (-y)^{-l-i} x_k^i
                let mut fac: BTreeMap<i64, Poly> = BTreeMap::from([(0, Poly::one(n))]);
                for &(y, l) in &factors {
                    let mut s = BTreeMap::new();
                    for i in 0..=depth.max(-1) {
                        let b = binomial_coeff(&Rational::from_integer((-(l as i64)).into()), i as u32);
                        let e = -(l as i64) - i;
                        let c = if e.rem_euclid(2) == 0 { b } else { -b };
                        s.insert(i, Poly::var_pow(n, y, Exponent::int(e)).scale(&c));
                    }
                    fac = mul_truncated(&fac, &s, depth);
                }
                let mut out = PuiseuxSeries::new(site.local_coordinate(), [], Window::Below(trunc));
                for (e, p) in &cols {
                    for (i, f) in &fac {
                        let ex = *e + Exponent::int(*i);
                        if ex <= trunc {
                            out.add_term(ex, coeff(p * f, &other_poles));
                        }
                    }
                }
                Ok(out)
            }
            ExpansionSite::AtInfinity(_) => {
                let cols = num.collect_var(k);
                let Some(vmax) = cols.keys().next_back().copied() else {
                    return Ok(PuiseuxSeries::new(site.local_coordinate(), [], Window::Above(trunc)));
                };
                let ltot: i64 = factors.iter().map(|(_, l)| *l as i64).sum();
                let depth = (vmax - Exponent::int(ltot) - trunc).floor();
                // (x_k - y)^{-l} = x_k^{-l} sum_i binom(l+i-1, i) y^i x_k^{-i}
                let mut fac: BTreeMap<i64, Poly> = BTreeMap::from([(0, Poly::one(n))]);
                for &(y, l) in &factors {
                    let mut s = BTreeMap::new();
                    for i in 0..=depth.max(-1) {
                        let b = binomial_coeff(&Rational::from_integer((l as i64 + i - 1).into()), i as u32);
                        s.insert(i, Poly::var_pow(n, y, Exponent::int(i)).scale(&b));
                    }
                    fac = mul_truncated(&fac, &s, depth);
                }
                let mut out = PuiseuxSeries::new(site.local_coordinate(), [], Window::Above(trunc));
                for (e, p) in &cols {
                    for (i, f) in &fac {
                        let ex = *e - Exponent::int(ltot + *i);
                        if ex >= trunc {
                            out.add_term(ex, coeff(p * f, &other_poles));
                        }
                    }
                }
                Ok(out)
            }
            ExpansionSite::AtDiagonal(_, base) => {
                let b = self
                    .var_index(base)
                    .ok_or_else(|| SeriesError::UnsupportedShape(format!("no variable {base}")))?;
                if b == k {
                    return Err(SeriesError::UnsupportedShape("diagonal needs two distinct variables".into()));
                }
                let l0 = factors.iter().filter(|(y, _)| *y == b).map(|(_, l)| *l as i64).sum::<i64>();
                let depth = trunc.floor() + l0;
                let mut out = PuiseuxSeries::new(site.local_coordinate(), [], Window::Below(trunc));
                if depth < 0 {
                    return Ok(out);
                }
                // Coefficients are functions in all variables with x_k frozen at exponent zero.
                let as_fn = |p: Poly, poles: BTreeMap<(usize, usize), u32>| MultiPointFunction::new(self.vars.clone(), p, poles);
                let mut series: BTreeMap<i64, MultiPointFunction> =
                    num.shift_expand(k, b, depth).into_iter().map(|(p, c)| (p, as_fn(c, other_poles.clone()))).collect();
                for &(y, l) in factors.iter().filter(|(y, _)| *y != b) {
                    // (x_b - x_y + t)^{-l} = sum_i binom(-l, i) (x_b - x_y)^{-l-i} t^i
                    let mut s = BTreeMap::new();
                    for i in 0..=depth {
                        let c = binomial_coeff(&Rational::from_integer((-(l as i64)).into()), i as u32);
                        s.insert(i, as_fn(Poly::constant(n, c), BTreeMap::from([((b.min(y), b.max(y)), l + i as u32)])).scale(&if b < y || (l as i64 + i) % 2 == 0 {
                            Rational::one()
                        } else {
                            -Rational::one()
                        }));
                    }
                    series = mul_truncated_fn(&series, &s, depth);
                }
                for (p, c) in series {
                    let ex = Exponent::int(p - l0);
                    if ex <= trunc {
                        out.add_term(ex, c.remove_var(site.variable()));
                    }
                }
                Ok(out)
            }
        }
    }

    /// Coefficient of the local coordinate to the power `-1` at a site.
    pub fn residue_at(&self, site: &ExpansionSite) -> Result<MultiPointFunction, SeriesError> {
        let s = self.expand(site, Exponent::int(-1))?;
        let rest: Vec<String> = self.vars.iter().filter(|v| *v != site.variable()).cloned().collect();
        Ok(s.get(Exponent::int(-1)).cloned().unwrap_or_else(|| MultiPointFunction::zero(rest)))
    }

    /// Text rendering `N / ((x_i-x_j)^l ...)`.
    pub fn render(&self) -> String {
        let num = self.num.render(&self.vars);
        if self.poles.is_empty() {
            return num;
        }
        let den: Vec<String> = self
            .poles
            .iter()
            .map(|((i, j), l)| {
                let d = format!("({}-{})", self.vars[*i], self.vars[*j]);
                if *l == 1 {
                    d
                } else {
                    format!("{d}^{l}")
                }
            })
            .collect();
        format!("({num})/({})", den.join("*"))
    }
}

impl MultiPointFunction {
    /// JSON form `{"vars", "numerator": [{"exp": [..], "coef"}], "poles": [{"pair": [i, j], "order"}]}`.
    ///
    /// ```
    /// use voatwist::mpf::MultiPointFunction;
    /// let f = MultiPointFunction::diagonal_pole(vec!["z".into(), "w".into()], "z", "w", 2);
    /// let back = MultiPointFunction::from_json(&f.to_json()).unwrap();
    /// assert!(back.rational_equal(&f));
    /// ```
    pub fn to_json(&self) -> Value {
        json!({
            "vars": self.vars,
            "numerator": self
                .num
                .terms()
                .map(|(e, c)| json!({"exp": e.iter().map(|x| x.to_string()).collect::<Vec<_>>(), "coef": fmt_q(c)}))
                .collect::<Vec<_>>(),
            "poles": self.poles.iter().map(|((i, j), l)| json!({"pair": [i, j], "order": l})).collect::<Vec<_>>(),
        })
    }

    /// Parses the JSON form produced by [`MultiPointFunction::to_json`].
    pub fn from_json(v: &Value) -> Option<Self> {
        let vars: Vec<String> = v.get("vars")?.as_array()?.iter().map(|x| x.as_str().map(String::from)).collect::<Option<_>>()?;
        let mut num = Poly::zero(vars.len());
        for t in v.get("numerator")?.as_array()? {
            let e: Vec<Exponent> = t.get("exp")?.as_array()?.iter().map(|x| x.as_str()?.parse().ok()).collect::<Option<_>>()?;
            if e.len() != vars.len() {
                return None;
            }
            num.add_term(e, parse_q(t.get("coef")?.as_str()?).ok()?);
        }
        let mut poles = Vec::new();
        for p in v.get("poles")?.as_array()? {
            let pair = p.get("pair")?.as_array()?;
            let (i, j) = (pair.first()?.as_u64()? as usize, pair.get(1)?.as_u64()? as usize);
            if i >= vars.len() || j >= vars.len() || i == j {
                return None;
            }
            poles.push(((i, j), p.get("order")?.as_u64()? as u32));
        }
        Some(MultiPointFunction::new(vars, num, poles))
    }
}

impl fmt::Display for MultiPointFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

impl Coefficient for MultiPointFunction {
    fn is_zero_coeff(&self) -> bool {
        self.is_zero()
    }
    fn add_coeff(&self, o: &Self) -> Self {
        self.add(o)
    }
    fn mul_coeff(&self, o: &Self) -> Self {
        self.mul(o)
    }
    fn scale_coeff(&self, c: &Rational) -> Self {
        self.scale(c)
    }
    fn eq_coeff(&self, o: &Self) -> bool {
        self.rational_equal(o)
    }
    fn render_coeff(&self) -> String {
        self.render()
    }
}

fn mul_truncated(a: &BTreeMap<i64, Poly>, b: &BTreeMap<i64, Poly>, depth: i64) -> BTreeMap<i64, Poly> {
    let mut out: BTreeMap<i64, Poly> = BTreeMap::new();
    for (i, p) in a {
        for (j, q) in b {
            if i + j <= depth {
                let prod = p * q;
                let e = out.entry(i + j).or_insert_with(|| Poly::zero(p.nvars()));
                *e = &*e + &prod;
            }
        }
    }
    out.retain(|_, p| !p.is_zero());
    out
}

fn mul_truncated_fn(a: &BTreeMap<i64, MultiPointFunction>, b: &BTreeMap<i64, MultiPointFunction>, depth: i64) -> BTreeMap<i64, MultiPointFunction> {
    let mut out: BTreeMap<i64, MultiPointFunction> = BTreeMap::new();
    for (i, p) in a {
        for (j, q) in b {
            if i + j <= depth {
                let prod = p.mul(q);
                let merged = match out.remove(&(i + j)) {
                    Some(e) => e.add(&prod),
                    None => prod,
                };
                out.insert(i + j, merged);
            }
        }
    }
    out.retain(|_, p| !p.is_zero());
    out
}

/// Variable list `["z1", ..., "zn", "w"]`.
pub fn point_vars(n: usize) -> Vec<String> {
    let mut v: Vec<String> = (1..=n).map(|i| format!("z{i}")).collect();
    v.push("w".into());
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{q, qi};

    fn zw() -> Vec<String> {
        vec!["z".into(), "w".into()]
    }

    #[test]
    fn reduction_cancels_common_factor() {
        let n = Poly::diff(2, 0, 1).shift(&[Exponent::int(1), Exponent::zero()]);
        let f = MultiPointFunction::new(zw(), n, [((0, 1), 2)]);
        assert_eq!(f.pole_order(0, 1), 1);
        let g = MultiPointFunction::var_pow(zw(), "z", Exponent::int(1)).mul(&MultiPointFunction::diagonal_pole(zw(), "z", "w", 1));
        assert!(f.rational_equal(&g));
    }

    #[test]
    fn geometric_expansions() {
        let f = MultiPointFunction::diagonal_pole(zw(), "z", "w", 1);
        let inf = f.expand(&ExpansionSite::AtInfinity("z".into()), Exponent::int(-4)).unwrap();
        let w = |e: i64| MultiPointFunction::var_pow(vec!["w".into()], "w", Exponent::int(e));
        for i in 0..4 {
            assert!(inf.get(Exponent::int(-1 - i)).unwrap().rational_equal(&w(i)));
        }
        let zero = f.expand(&ExpansionSite::AtZero("z".into()), Exponent::int(3)).unwrap();
        for i in 0..=3 {
            assert!(zero.get(Exponent::int(i)).unwrap().rational_equal(&w(-1 - i).neg()));
        }
    }

    #[test]
    fn square_root_at_diagonal() {
        let f = MultiPointFunction::var_pow(zw(), "z", Exponent::new(1, 2));
        let s = f.expand(&ExpansionSite::AtDiagonal("z".into(), "w".into()), Exponent::int(2)).unwrap();
        let w = |e: Exponent, c: Rational| MultiPointFunction::monomial(vec!["w".into()], vec![e], c);
        assert!(s.get(Exponent::int(0)).unwrap().rational_equal(&w(Exponent::new(1, 2), qi(1))));
        assert!(s.get(Exponent::int(1)).unwrap().rational_equal(&w(Exponent::new(-1, 2), q(1, 2))));
        assert!(s.get(Exponent::int(2)).unwrap().rational_equal(&w(Exponent::new(-3, 2), q(-1, 8))));
    }

    #[test]
    fn derivative_quotient_rule() {
        let w = MultiPointFunction::var_pow(zw(), "w", Exponent::int(1));
        let f = w.mul(&MultiPointFunction::diagonal_pole(zw(), "z", "w", 1));
        let d = f.derivative("w");
        let z = MultiPointFunction::var_pow(zw(), "z", Exponent::int(1));
        let expected = z.mul(&MultiPointFunction::diagonal_pole(zw(), "z", "w", 2));
        assert!(d.rational_equal(&expected));
    }
}
