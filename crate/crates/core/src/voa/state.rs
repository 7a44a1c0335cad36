//! Normal-ordered Fock monomials and finite linear combinations of them.
//!
//! A [`Monomial`] is `h^{i_1}(m_1) ... h^{i_k}(m_k) e^beta` with creation
//! modes `m_j < 0` in PBW order (most negative first, ties by generator
//! index) and a label `beta` in coordinates of the basis of `h`.  The same
//! type describes states of the Heisenberg and lattice algebras, of their
//! untwisted modules, and of the twisted Fock spaces (half-integral modes,
//! zero label).

use num_traits::{One, Zero};
use serde_json::{json, Value};
use std::collections::BTreeMap;
use std::fmt;

use crate::exponent::Exponent;
use crate::rational::{fmt_q, parse_q, Rational};
use crate::voa::{Form, VoaError};

/// A normal-ordered Fock monomial.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial {
    modes: Vec<(usize, Exponent)>,
    label: Vec<Rational>,
}

impl Monomial {
    /// Builds a monomial, sorting the modes into PBW order.
    pub fn new(mut modes: Vec<(usize, Exponent)>, label: Vec<Rational>) -> Self {
        modes.sort_by(|a, b| a.1.cmp(&b.1).then(a.0.cmp(&b.0)));
        Monomial { modes, label }
    }

    /// The state `e^beta` (the vacuum when `beta = 0`).
    pub fn lattice(label: Vec<Rational>) -> Self {
        Monomial { modes: Vec::new(), label }
    }

    /// The vacuum of a rank-`d` Fock space.
    pub fn vacuum(d: usize) -> Self {
        Monomial::lattice(vec![Rational::zero(); d])
    }

    /// Creation modes `(generator, mode)` in PBW order.
    pub fn modes(&self) -> &[(usize, Exponent)] {
        &self.modes
    }

    /// The label `beta`.
    pub fn label(&self) -> &[Rational] {
        &self.label
    }

    /// Number of creation modes.
    pub fn length(&self) -> usize {
        self.modes.len()
    }

    /// `sum |m_j|`, the Heisenberg part of the weight.
    pub fn mode_degree(&self) -> Exponent {
        self.modes.iter().fold(Exponent::zero(), |acc, (_, m)| acc - *m)
    }

    /// Same modes with another label.
    pub fn with_label(&self, label: Vec<Rational>) -> Self {
        Monomial { modes: self.modes.clone(), label }
    }

    /// Inserts a creation mode.
    pub fn with_mode(&self, gen: usize, m: Exponent) -> Self {
        let mut modes = self.modes.clone();
        let pos = modes.partition_point(|x| (x.1, x.0) <= (m, gen));
        modes.insert(pos, (gen, m));
        Monomial { modes, label: self.label.clone() }
    }

    /// Removes the mode at a position.
    pub fn without(&self, pos: usize) -> Self {
        let mut modes = self.modes.clone();
        modes.remove(pos);
        Monomial { modes, label: self.label.clone() }
    }

    /// Text form such as `a[-2]a[-1].e(1/2 a)`; the bare vacuum is `1`.
    pub fn render(&self, form: &Form) -> String {
        let mut s = String::new();
        for (g, m) in &self.modes {
            s.push_str(&format!("{}[{}]", form.names()[*g], m));
        }
        if self.label.iter().any(|x| !x.is_zero()) {
            if !s.is_empty() {
                s.push('.');
            }
            let parts: Vec<String> = self
                .label
                .iter()
                .enumerate()
                .filter(|(_, c)| !c.is_zero())
                .map(|(i, c)| if c.is_one() { form.names()[i].clone() } else { format!("{} {}", fmt_q(c), form.names()[i]) })
                .collect();
            s.push_str(&format!("e({})", parts.join(" + ")));
        }
        if s.is_empty() {
            s.push('1');
        }
        s
    }

    /// Parses the text form produced by [`Monomial::render`].
    pub fn parse(text: &str, form: &Form) -> Result<Self, VoaError> {
        let bad = || VoaError::Parse(text.to_string());
        let t = text.trim();
        let mut label = vec![Rational::zero(); form.rank()];
        if t == "1" {
            return Ok(Monomial::lattice(label));
        }
        let (modes_part, label_part) = match t.find("e(") {
            Some(p) => (t[..p].trim_end_matches('.'), Some(&t[p..])),
            None => (t, None),
        };
        if let Some(lp) = label_part {
            let inner = lp.strip_prefix("e(").and_then(|x| x.strip_suffix(')')).ok_or_else(bad)?;
            for part in inner.split('+') {
                let part = part.trim();
                let (c, name) = match part.rsplit_once(' ') {
                    Some((c, n)) => (parse_q(c).map_err(|_| bad())?, n),
                    None => (Rational::one(), part),
                };
                let i = form.index(name).ok_or_else(bad)?;
                label[i] += c;
            }
        }
        let mut modes = Vec::new();
        let mut rest = modes_part;
        while !rest.is_empty() {
            let open = rest.find('[').ok_or_else(bad)?;
            let close = rest.find(']').ok_or_else(bad)?;
            let g = form.index(&rest[..open]).ok_or_else(bad)?;
            let m: Exponent = rest[open + 1..close].parse().map_err(|_| bad())?;
            if !m.is_negative() {
                return Err(bad());
            }
            modes.push((g, m));
            rest = &rest[close + 1..];
        }
        Ok(Monomial::new(modes, label))
    }
}

/// A finite linear combination of monomials with rational coefficients.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct GradedVector {
    terms: BTreeMap<Monomial, Rational>,
}

impl GradedVector {
    /// The zero vector.
    pub fn zero() -> Self {
        GradedVector::default()
    }

    /// A single basis monomial.
    pub fn basis(m: Monomial) -> Self {
        GradedVector::term(m, Rational::one())
    }

    /// `c * m`.
    pub fn term(m: Monomial, c: Rational) -> Self {
        let mut v = GradedVector::zero();
        v.add_term(m, c);
        v
    }

    /// Terms in monomial order.
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

    /// True for the zero vector.
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Coefficient of a monomial.
    pub fn coeff(&self, m: &Monomial) -> Rational {
        self.terms.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    /// Adds `c * m`.
    pub fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(e) => {
                e.insert(c);
            }
            Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    /// Adds `c * v` in place.
    pub fn add_scaled(&mut self, v: &GradedVector, c: &Rational) {
        if c.is_zero() {
            return;
        }
        for (m, x) in &v.terms {
            self.add_term(m.clone(), x * c);
        }
    }

    /// Sum.
    pub fn add(&self, v: &GradedVector) -> GradedVector {
        let mut out = self.clone();
        out.add_scaled(v, &Rational::one());
        out
    }

    /// Difference.
    pub fn sub(&self, v: &GradedVector) -> GradedVector {
        let mut out = self.clone();
        out.add_scaled(v, &-Rational::one());
        out
    }

    /// Scalar multiple.
    pub fn scale(&self, c: &Rational) -> GradedVector {
        let mut out = GradedVector::zero();
        out.add_scaled(self, c);
        out
    }

    /// Keeps the terms satisfying a predicate.
    pub fn filter(&self, keep: impl Fn(&Monomial) -> bool) -> GradedVector {
        GradedVector { terms: self.terms.iter().filter(|(m, _)| keep(m)).map(|(m, c)| (m.clone(), c.clone())).collect() }
    }

    /// Text form `c1 m1 + c2 m2`; the zero vector is `0`.
    pub fn render(&self, form: &Form) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(m, c)| if c.is_one() { m.render(form) } else { format!("{} {}", fmt_q(c), m.render(form)) })
            .collect();
        parts.join(" + ")
    }

    /// JSON term list `[{"monomial": ..., "coeff": ...}, ...]`.
    pub fn to_json(&self, form: &Form) -> Value {
        Value::Array(self.terms.iter().map(|(m, c)| json!({"monomial": m.render(form), "coeff": fmt_q(c)})).collect())
    }

    /// Inverse of [`GradedVector::to_json`].
    pub fn from_json(v: &Value, form: &Form) -> Result<Self, VoaError> {
        let bad = || VoaError::Parse(v.to_string());
        let mut out = GradedVector::zero();
        for t in v.as_array().ok_or_else(bad)? {
            let m = Monomial::parse(t["monomial"].as_str().ok_or_else(bad)?, form)?;
            let c = parse_q(t["coeff"].as_str().ok_or_else(bad)?).map_err(|_| bad())?;
            out.add_term(m, c);
        }
        Ok(out)
    }
}

impl FromIterator<(Monomial, Rational)> for GradedVector {
    fn from_iter<I: IntoIterator<Item = (Monomial, Rational)>>(it: I) -> Self {
        let mut v = GradedVector::zero();
        for (m, c) in it {
            v.add_term(m, c);
        }
        v
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let modes: Vec<String> = self.modes.iter().map(|(g, m)| format!("h{g}[{m}]")).collect();
        let label: Vec<String> = self.label.iter().map(fmt_q).collect();
        write!(f, "{}.e({})", modes.join(""), label.join(","))
    }
}
