//! Truncated formal Puiseux series with explicit windows of exactness.
//!
//! A [`PuiseuxSeries`] stores finitely many terms `c_e * x^e` together with a
//! [`Window`] saying where the stored data is guaranteed to be the exact
//! expansion.  Expansions at a finite point are exact below a cutoff
//! ([`Window::Below`]); expansions at infinity are exact above one
//! ([`Window::Above`]).  Arithmetic intersects windows so that results never
//! claim more precision than their inputs.

use num_traits::{One, Zero};
use serde_json::{json, Value};
use std::collections::BTreeMap;
use std::fmt;
use thiserror::Error;

use crate::exponent::Exponent;
use crate::rational::{fmt_q, Rational};

/// Errors raised by series operations.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SeriesError {
    /// The requested coefficient lies outside the exact window.
    #[error("exponent {exp} lies outside the exact window {window}")]
    WindowTooNarrow {
        /// Requested exponent.
        exp: Exponent,
        /// Window of the series.
        window: Window,
    },
    /// Two series with incompatible windows were multiplied.
    #[error("cannot combine windows {0} and {1}")]
    WindowMismatch(Window, Window),
    /// Two series in different variables were combined.
    #[error("variable mismatch: {0} vs {1}")]
    VariableMismatch(String, String),
    /// The function is not of the supported rational shape.
    #[error("unsupported shape: {0}")]
    UnsupportedShape(String),
    /// A one-form does not descend to the projective line.
    #[error("not single valued: fractional exponent {0} remains")]
    NotSingleValued(Exponent),
}

/// Range of exponents on which a series is exact.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Window {
    /// Exact for every exponent.
    Exact,
    /// Exact for every exponent `<= high`.
    Below(Exponent),
    /// Exact for every exponent `>= low`.
    Above(Exponent),
}

impl Window {
    /// True when the coefficient of `x^e` is exact.
    pub fn contains(&self, e: Exponent) -> bool {
        match self {
            Window::Exact => true,
            Window::Below(h) => e <= *h,
            Window::Above(l) => e >= *l,
        }
    }

    /// Lower and upper bounds as strings, `"-inf"`/`"inf"` when unbounded.
    pub fn bounds(&self) -> (String, String) {
        match self {
            Window::Exact => ("-inf".into(), "inf".into()),
            Window::Below(h) => ("-inf".into(), h.to_string()),
            Window::Above(l) => (l.to_string(), "inf".into()),
        }
    }

    fn meet(self, o: Window) -> Result<Window, SeriesError> {
        match (self, o) {
            (Window::Exact, w) | (w, Window::Exact) => Ok(w),
            (Window::Below(a), Window::Below(b)) => Ok(Window::Below(a.min(b))),
            (Window::Above(a), Window::Above(b)) => Ok(Window::Above(a.max(b))),
            (a, b) => Err(SeriesError::WindowMismatch(a, b)),
        }
    }
}

impl fmt::Display for Window {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (lo, hi) = self.bounds();
        write!(f, "[{lo}, {hi}]")
    }
}

/// Coefficient ring of a series.
pub trait Coefficient: Clone + fmt::Debug {
    /// True for the zero element.
    fn is_zero_coeff(&self) -> bool;
    /// Sum.
    fn add_coeff(&self, o: &Self) -> Self;
    /// Product.
    fn mul_coeff(&self, o: &Self) -> Self;
    /// Multiplication by a scalar.
    fn scale_coeff(&self, c: &Rational) -> Self;
    /// Exact equality (as functions, not as representations).
    fn eq_coeff(&self, o: &Self) -> bool;
    /// Text form used in JSON output.
    fn render_coeff(&self) -> String;
}

impl Coefficient for Rational {
    fn is_zero_coeff(&self) -> bool {
        self.is_zero()
    }
    fn add_coeff(&self, o: &Self) -> Self {
        self + o
    }
    fn mul_coeff(&self, o: &Self) -> Self {
        self * o
    }
    fn scale_coeff(&self, c: &Rational) -> Self {
        self * c
    }
    fn eq_coeff(&self, o: &Self) -> bool {
        self == o
    }
    fn render_coeff(&self) -> String {
        fmt_q(self)
    }
}

/// Truncated Puiseux series `sum c_e x^e` with a window of exactness.
#[derive(Clone, Debug)]
pub struct PuiseuxSeries<C: Coefficient = Rational> {
    var: String,
    terms: BTreeMap<Exponent, C>,
    window: Window,
}

impl<C: Coefficient> PuiseuxSeries<C> {
    /// Builds a series, dropping zero coefficients.
    pub fn new(var: impl Into<String>, terms: impl IntoIterator<Item = (Exponent, C)>, window: Window) -> Self {
        let mut s = PuiseuxSeries { var: var.into(), terms: BTreeMap::new(), window };
        for (e, c) in terms {
            s.add_term(e, c);
        }
        s
    }

    /// The series variable.
    pub fn var(&self) -> &str {
        &self.var
    }

    /// The window of exactness.
    pub fn window(&self) -> Window {
        self.window
    }

    /// Stored nonzero terms in increasing exponent order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Exponent, &C)> {
        self.terms.iter()
    }

    /// Coefficient of `x^e` if stored (`None` means zero when `e` is in the window).
    pub fn get(&self, e: Exponent) -> Option<&C> {
        self.terms.get(&e)
    }

    /// Coefficient of `x^e`, failing when `e` is outside the window.
    pub fn coeff(&self, e: Exponent) -> Result<Option<&C>, SeriesError> {
        if !self.window.contains(e) {
            return Err(SeriesError::WindowTooNarrow { exp: e, window: self.window });
        }
        Ok(self.terms.get(&e))
    }

    /// True when no terms are stored.
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Adds `c x^e` in place.
    pub fn add_term(&mut self, e: Exponent, c: C) {
        if c.is_zero_coeff() {
            return;
        }
        let merged = match self.terms.remove(&e) {
            Some(old) => old.add_coeff(&c),
            None => c,
        };
        if !merged.is_zero_coeff() {
            self.terms.insert(e, merged);
        }
    }

    /// Restricts stored terms to the window.
    pub fn clip(mut self) -> Self {
        let w = self.window;
        self.terms.retain(|e, _| w.contains(*e));
        self
    }

    /// Multiplies every coefficient by `c`.
    pub fn scale(&self, c: &Rational) -> Self {
        PuiseuxSeries::new(self.var.clone(), self.terms.iter().map(|(e, x)| (*e, x.scale_coeff(c))), self.window)
    }

    /// Multiplies by `x^e`.
    pub fn shift(&self, e: Exponent) -> Self {
        let window = match self.window {
            Window::Exact => Window::Exact,
            Window::Below(h) => Window::Below(h + e),
            Window::Above(l) => Window::Above(l + e),
        };
        PuiseuxSeries { var: self.var.clone(), terms: self.terms.iter().map(|(k, c)| (*k + e, c.clone())).collect(), window }
    }

    /// Sum; the window is the intersection.
    pub fn try_add(&self, o: &Self) -> Result<Self, SeriesError> {
        self.check_var(o)?;
        let mut out = self.clone();
        out.window = self.window.meet(o.window)?;
        for (e, c) in &o.terms {
            out.add_term(*e, c.clone());
        }
        Ok(out.clip())
    }

    /// Product; the window is the largest range on which the product is exact.
    pub fn try_mul(&self, o: &Self) -> Result<Self, SeriesError> {
        self.check_var(o)?;
        let window = product_window(self, o)?;
        let mut out = PuiseuxSeries { var: self.var.clone(), terms: BTreeMap::new(), window };
        for (e1, c1) in &self.terms {
            for (e2, c2) in &o.terms {
                let e = *e1 + *e2;
                if window.contains(e) {
                    out.add_term(e, c1.mul_coeff(c2));
                }
            }
        }
        Ok(out)
    }

    /// True when both series agree on every exponent exact in both.
    pub fn agrees_with(&self, o: &Self) -> bool {
        if self.var != o.var {
            return false;
        }
        let both = |e: &Exponent| self.window.contains(*e) && o.window.contains(*e);
        for (e, c) in &self.terms {
            if !both(e) {
                continue;
            }
            match o.terms.get(e) {
                Some(d) if c.eq_coeff(d) => {}
                _ => return false,
            }
        }
        o.terms.keys().filter(|e| both(e)).all(|e| self.terms.contains_key(e))
    }

    /// JSON form `{"var", "terms": [{"exp", "coef"}], "window": [lo, hi]}`.
    pub fn to_json(&self) -> Value {
        let (lo, hi) = self.window.bounds();
        json!({
            "var": self.var,
            "terms": self.terms.iter().map(|(e, c)| json!({"exp": e.to_string(), "coef": c.render_coeff()})).collect::<Vec<_>>(),
            "window": [lo, hi],
        })
    }

    fn check_var(&self, o: &Self) -> Result<(), SeriesError> {
        if self.var != o.var {
            return Err(SeriesError::VariableMismatch(self.var.clone(), o.var.clone()));
        }
        Ok(())
    }
}

impl PuiseuxSeries<Rational> {
    /// Parses the JSON form produced by [`PuiseuxSeries::to_json`].
    pub fn from_json(v: &Value) -> Option<Self> {
        let var = v.get("var")?.as_str()?.to_string();
        let mut terms = Vec::new();
        for t in v.get("terms")?.as_array()? {
            let e: Exponent = t.get("exp")?.as_str()?.parse().ok()?;
            let c = crate::rational::parse_q(t.get("coef")?.as_str()?).ok()?;
            terms.push((e, c));
        }
        let w = v.get("window")?.as_array()?;
        let (lo, hi) = (w.first()?.as_str()?, w.get(1)?.as_str()?);
        let window = match (lo, hi) {
            ("-inf", "inf") => Window::Exact,
            ("-inf", h) => Window::Below(h.parse().ok()?),
            (l, "inf") => Window::Above(l.parse().ok()?),
            _ => return None,
        };
        Some(PuiseuxSeries::new(var, terms, window))
    }

    /// The monomial `x^e` as an exact series.
    pub fn monomial(var: impl Into<String>, e: Exponent) -> Self {
        PuiseuxSeries::new(var, [(e, Rational::one())], Window::Exact)
    }
}

fn product_window<C: Coefficient>(a: &PuiseuxSeries<C>, b: &PuiseuxSeries<C>) -> Result<Window, SeriesError> {
    let lowest = |s: &PuiseuxSeries<C>| s.terms.keys().next().copied();
    let highest = |s: &PuiseuxSeries<C>| s.terms.keys().next_back().copied();
    Ok(match (a.window, b.window) {
        (Window::Exact, Window::Exact) => Window::Exact,
        (Window::Below(h), Window::Exact) | (Window::Exact, Window::Below(h)) => {
            let exact = if matches!(a.window, Window::Exact) { a } else { b };
            match lowest(exact) {
                Some(v) => Window::Below(h + v),
                None => Window::Exact,
            }
        }
        (Window::Above(l), Window::Exact) | (Window::Exact, Window::Above(l)) => {
            let exact = if matches!(a.window, Window::Exact) { a } else { b };
            match highest(exact) {
                Some(v) => Window::Above(l + v),
                None => Window::Exact,
            }
        }
        (Window::Below(ha), Window::Below(hb)) => {
            let x = ha + lowest(b).unwrap_or(hb);
            let y = hb + lowest(a).unwrap_or(ha);
            Window::Below(x.min(y))
        }
        (Window::Above(la), Window::Above(lb)) => {
            let x = la + highest(b).unwrap_or(lb);
            let y = lb + highest(a).unwrap_or(la);
            Window::Above(x.max(y))
        }
        (wa, wb) => return Err(SeriesError::WindowMismatch(wa, wb)),
    })
}

/// Coefficient of `x^{-1}`, failing when `-1` is outside the exact window.
/// A missing term is reported as `None`.
///
/// ```
/// use voatwist::series::{residue, PuiseuxSeries};
/// use voatwist::exponent::Exponent;
/// let s = PuiseuxSeries::monomial("z", Exponent::new(-1, 2));
/// assert_eq!(residue(&s).unwrap(), None);
/// ```
pub fn residue<C: Coefficient>(s: &PuiseuxSeries<C>) -> Result<Option<C>, SeriesError> {
    Ok(s.coeff(Exponent::int(-1))?.cloned())
}

/// Where a function is expanded.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ExpansionSite {
    /// Expansion in nonnegative-leaning powers of the variable around `0`.
    AtZero(String),
    /// Expansion in decreasing powers of the variable around `infinity`.
    AtInfinity(String),
    /// Expansion in powers of `variable - base` around `variable = base`.
    AtDiagonal(String, String),
}

impl ExpansionSite {
    /// The expanded variable.
    pub fn variable(&self) -> &str {
        match self {
            ExpansionSite::AtZero(v) | ExpansionSite::AtInfinity(v) | ExpansionSite::AtDiagonal(v, _) => v,
        }
    }

    /// Name of the local coordinate of the resulting series.
    pub fn local_coordinate(&self) -> String {
        match self {
            ExpansionSite::AtZero(v) | ExpansionSite::AtInfinity(v) => v.clone(),
            ExpansionSite::AtDiagonal(v, b) => format!("{v}-{b}"),
        }
    }
}

impl fmt::Display for ExpansionSite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExpansionSite::AtZero(v) => write!(f, "{v}=0"),
            ExpansionSite::AtInfinity(v) => write!(f, "{v}=inf"),
            ExpansionSite::AtDiagonal(v, b) => write!(f, "{v}={b}"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{q, qi};

    fn e(n: i64) -> Exponent {
        Exponent::int(n)
    }

    #[test]
    fn residue_of_simple_pole_and_window_error() {
        let s = PuiseuxSeries::monomial("z", e(-1));
        assert_eq!(residue(&s).unwrap(), Some(qi(1)));
        let t = PuiseuxSeries::<Rational>::new("z", [(e(3), qi(1))], Window::Above(e(0)));
        assert!(matches!(residue(&t), Err(SeriesError::WindowTooNarrow { .. })));
    }

    #[test]
    fn product_windows_shrink() {
        let a = PuiseuxSeries::new("z", [(e(-1), qi(1)), (e(0), qi(2))], Window::Below(e(3)));
        let b = PuiseuxSeries::new("z", [(e(-2), qi(1))], Window::Below(e(1)));
        let p = a.try_mul(&b).unwrap();
        assert_eq!(p.window(), Window::Below(e(0)));
        assert_eq!(p.get(e(-3)), Some(&qi(1)));
        assert_eq!(p.get(e(-2)), Some(&qi(2)));
        let c = PuiseuxSeries::new("z", [(e(-2), q(1, 3))], Window::Above(e(-5)));
        assert!(a.try_mul(&c).is_err());
    }

    #[test]
    fn json_round_trip() {
        let a = PuiseuxSeries::new("z", [(Exponent::new(-1, 2), q(3, 4)), (e(2), qi(-1))], Window::Below(e(4)));
        let j = a.to_json();
        assert_eq!(j["window"][0], "-inf");
        let b = PuiseuxSeries::from_json(&j).unwrap();
        assert!(a.agrees_with(&b));
        assert_eq!(b.window(), a.window());
    }
}
