//! Twisted Zhu algebras `A_g(V)` and bimodules `A_g(M)`, `B_{g,lambda}(M)`
//! computed on truncation windows.
//!
//! For `a` in `V^r` of weight `wt a`,
//!
//! ```text
//!   a o_g u = Res_z Y(a, z) u (1+z)^{wt a - 1 + delta(r) + r/T} / z^{1 + delta(r)}
//!   a *_g u = Res_z Y(a, z) u (1+z)^{wt a} / z          (r = 0, zero otherwise)
//!   u *_g a = Res_z Y(a, z) u (1+z)^{wt a - 1} / z      (r = 0, zero otherwise)
//! ```
//!
//! where `delta(0) = 1` and `delta(r) = 0` otherwise.  The subspace `O_g`
//! is spanned by the circle products (and, for `B_{g,lambda}`, by the vectors
//! `(L(-1) + L(0) + lambda) u`).  A [`Reduction`] builds these generators on
//! a working window `max_degree + slack`, row reduces them with columns in
//! descending degree, and keeps the relations whose leading degree lies in
//! the window.  Classes are represented by their normal forms on the free
//! (standard) monomials.
//!
//! ```
//! use voatwist::voa::{VoaInstance, Twist};
//! use voatwist::zhu::{quotient_algebra, TruncationWindow};
//! use voatwist::exponent::Exponent;
//! let v = VoaInstance::heisenberg_rank_one(Twist::Theta);
//! let a = quotient_algebra(&v, &TruncationWindow::new(Exponent::int(3))).unwrap();
//! assert_eq!(a.dim(), 1);
//! ```

use std::collections::HashMap;

use num_traits::{One, Zero};
use serde_json::{json, Value};
use thiserror::Error;

use crate::exponent::Exponent;
use crate::linalg::{add_to, Echelon, SparseVec};
use crate::rational::{binomial_coeff, fmt_q, qi, Rational};
use crate::voa::{GradedVector, ModuleInstance, Monomial, VoaError, VoaInstance};

/// Errors raised while reducing modulo `O_g`.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ZhuError {
    /// A vector has components beyond the truncation window.
    #[error("degree {degree} exceeds the truncation window {max}")]
    OutOfWindow {
        /// Degree of the offending component.
        degree: Exponent,
        /// The window bound.
        max: Exponent,
    },
    /// An error from the vertex algebra layer.
    #[error(transparent)]
    Voa(#[from] VoaError),
}

/// A finite truncation: degrees `<= max_degree` are reported, generators are
/// built up to `max_degree + slack`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct TruncationWindow {
    /// Largest reported degree.
    pub max_degree: Exponent,
    /// Extra degrees used while generating relations.
    pub slack: Exponent,
}

impl TruncationWindow {
    /// Window with the default slack of two.
    pub fn new(max_degree: Exponent) -> Self {
        TruncationWindow { max_degree, slack: Exponent::int(2) }
    }

    /// Window with an explicit slack.
    pub fn with_slack(max_degree: Exponent, slack: Exponent) -> Self {
        TruncationWindow { max_degree, slack }
    }

    /// The working bound `max_degree + slack`.
    pub fn working(&self) -> Exponent {
        self.max_degree + self.slack
    }
}

/// `sum_j binom(e, j) a_(s+j) u` for `a` in a single sector.
pub fn res_product(module: &ModuleInstance, a: &GradedVector, s: i64, e: &Rational, u: &GradedVector) -> Result<GradedVector, ZhuError> {
    let mut out = GradedVector::zero();
    if a.is_zero() || u.is_zero() {
        return Ok(out);
    }
    let wa = module.voa().weight(a)?;
    let bound = module.truncation_bound(wa, u)?;
    let mut j = 0u32;
    while Exponent::int(s + j as i64) <= bound {
        let c = binomial_coeff(e, j);
        if !c.is_zero() {
            let w = module.mode_action(a, Exponent::int(s + j as i64), u)?;
            out.add_scaled(&w, &c);
        }
        j += 1;
    }
    Ok(out)
}

pub(crate) fn homogeneous_parts(voa: &VoaInstance, a: &GradedVector) -> Result<Vec<(u32, GradedVector)>, ZhuError> {
    let mut by_weight: HashMap<Exponent, GradedVector> = HashMap::new();
    for (m, c) in a.terms() {
        let w = voa.weight(&GradedVector::basis(m.clone()))?;
        by_weight.entry(w).or_default().add_term(m.clone(), c.clone());
    }
    let mut out = Vec::new();
    for (_, v) in by_weight {
        out.extend(voa.split_sectors(&v));
    }
    Ok(out)
}

/// The family `Res_z Y(a, z) u (1+z)^{wt a - 1 + delta(r) + r/T} / z^{1 + delta(r) + k}`;
/// `k = 0` is the circle product.
pub fn circle_g_k(module: &ModuleInstance, a: &GradedVector, u: &GradedVector, k: i64) -> Result<GradedVector, ZhuError> {
    let voa = module.voa();
    let t = voa.order() as i64;
    let mut out = GradedVector::zero();
    for (r, part) in homogeneous_parts(voa, a)? {
        let wa = voa.weight(&part)?.to_rational();
        let delta = if r == 0 { 1 } else { 0 };
        let e = wa - qi(1) + qi(delta) + Rational::new((r as i64).into(), t.into());
        out = out.add(&res_product(module, &part, -1 - delta - k, &e, u)?);
    }
    Ok(out)
}

/// The circle product `a o_g u`.
pub fn circle_g(module: &ModuleInstance, a: &GradedVector, u: &GradedVector) -> Result<GradedVector, ZhuError> {
    circle_g_k(module, a, u, 0)
}

/// The left product `a *_g u`; only the `V^0` component of `a` contributes.
pub fn star_g(module: &ModuleInstance, a: &GradedVector, u: &GradedVector) -> Result<GradedVector, ZhuError> {
    let voa = module.voa();
    let mut out = GradedVector::zero();
    for (r, part) in homogeneous_parts(voa, a)? {
        if r == 0 {
            let wa = voa.weight(&part)?.to_rational();
            out = out.add(&res_product(module, &part, -1, &wa, u)?);
        }
    }
    Ok(out)
}

/// The right product `u *_g a`; only the `V^0` component of `a` contributes.
pub fn right_star_g(module: &ModuleInstance, u: &GradedVector, a: &GradedVector) -> Result<GradedVector, ZhuError> {
    let voa = module.voa();
    let mut out = GradedVector::zero();
    for (r, part) in homogeneous_parts(voa, a)? {
        if r == 0 {
            let wa = voa.weight(&part)?.to_rational();
            out = out.add(&res_product(module, &part, -1, &(wa - qi(1)), u)?);
        }
    }
    Ok(out)
}

/// Which quotient a [`Reduction`] computes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BimoduleMode {
    /// `A_g(M) = M / O_g(M)`.
    Ag,
    /// `B_{g,lambda}(M) = M / O_{g,lambda}(M)`.
    Bg(Rational),
}

/// Normal forms modulo `O_g` inside a truncation window.
#[derive(Clone, Debug)]
pub struct Reduction {
    module: ModuleInstance,
    window: TruncationWindow,
    columns: Vec<Monomial>,
    degrees: Vec<Exponent>,
    index: HashMap<Monomial, usize>,
    echelon: Echelon,
    generators: usize,
}

impl Reduction {
    /// Builds the reduction for `A_g(V)` (when `module` is the adjoint module)
    /// or for `A_g(M)` / `B_{g,lambda}(M)`.
    ///
    /// With `k_family` the relations with `k = 1` are added as well.
    pub fn build(module: &ModuleInstance, mode: &BimoduleMode, window: &TruncationWindow, k_family: bool) -> Result<Self, ZhuError> {
        let voa = module.voa();
        let work = window.working();
        let mut cols: Vec<(Exponent, Monomial)> = module.basis(work).into_iter().map(|m| (module.monomial_degree(&m), m)).collect();
        cols.sort_by(|(da, a), (db, b)| db.cmp(da).then(a.modes().cmp(b.modes())).then(a.label().cmp(b.label())));
        let degrees: Vec<Exponent> = cols.iter().map(|(d, _)| *d).collect();
        let columns: Vec<Monomial> = cols.into_iter().map(|(_, m)| m).collect();
        let index = columns.iter().enumerate().map(|(i, m)| (m.clone(), i)).collect();
        let mut red = Reduction { module: module.clone(), window: *window, columns, degrees, index, echelon: Echelon::new(0), generators: 0 };
        red.echelon = Echelon::new(red.columns.len());
        let sources = voa.eigenbasis(work);
        let targets: Vec<(Exponent, GradedVector)> = red.columns.iter().rev().map(|m| (module.monomial_degree(m), GradedVector::basis(m.clone()))).collect();
        let ks: &[i64] = if k_family { &[0, 1] } else { &[0] };
        for (r, a) in &sources {
            let wa = voa.weight(a)?;
            let lift = if *r == 0 { Exponent::int(1) } else { Exponent::zero() };
            for &k in ks {
                for (du, u) in &targets {
                    if wa + *du + lift + Exponent::int(k) > work {
                        break;
                    }
                    let g = circle_g_k(module, a, u, k)?;
                    red.insert(&g)?;
                }
            }
        }
        if let BimoduleMode::Bg(lambda) = mode {
            for (du, u) in &targets {
                if *du + Exponent::int(1) > work {
                    break;
                }
                let g = module.l_minus_one(u).add(&module.l_zero(u)).add(&u.scale(lambda));
                red.insert(&g)?;
            }
        }
        Ok(red)
    }

    fn insert(&mut self, g: &GradedVector) -> Result<(), ZhuError> {
        self.generators += 1;
        let v = self.to_sparse(g, self.window.working())?;
        self.echelon.insert(v);
        Ok(())
    }

    fn to_sparse(&self, v: &GradedVector, bound: Exponent) -> Result<SparseVec, ZhuError> {
        let mut out = SparseVec::new();
        for (m, c) in v.terms() {
            let d = self.module.monomial_degree(m);
            match self.index.get(m) {
                Some(&i) if d <= bound => add_to(&mut out, i, c.clone()),
                _ => return Err(ZhuError::OutOfWindow { degree: d, max: bound }),
            }
        }
        Ok(out)
    }

    /// The module being reduced.
    pub fn module(&self) -> &ModuleInstance {
        &self.module
    }

    /// The window.
    pub fn window(&self) -> &TruncationWindow {
        &self.window
    }

    /// Number of generators produced.
    pub fn generator_count(&self) -> usize {
        self.generators
    }

    /// Standard monomials of degree `<= max_degree`, in ascending degree.
    pub fn standard_monomials(&self) -> Vec<Monomial> {
        let mut out: Vec<usize> = self.echelon.free_columns().into_iter().filter(|&c| self.degrees[c] <= self.window.max_degree).collect();
        out.reverse();
        out.into_iter().map(|c| self.columns[c].clone()).collect()
    }

    /// Normal form of `u` on the standard monomials.
    pub fn reduce(&self, u: &GradedVector) -> Result<GradedVector, ZhuError> {
        let v = self.to_sparse(u, self.window.max_degree)?;
        let w = self.echelon.reduce(&v);
        Ok(w.into_iter().map(|(c, x)| (self.columns[c].clone(), x)).collect())
    }

    /// Largest degree occurring in the normal form of `u`, `None` when `u` is in `O_g`.
    pub fn filtration_degree(&self, u: &GradedVector) -> Result<Option<Exponent>, ZhuError> {
        let r = self.reduce(u)?;
        Ok(r.terms().map(|(m, _)| self.module.monomial_degree(m)).max())
    }

    /// Coordinates of the class of `u` in the given basis of standard monomials.
    pub fn coordinates(&self, u: &GradedVector, basis: &[Monomial]) -> Result<Vec<Rational>, ZhuError> {
        let r = self.reduce(u)?;
        Ok(basis.iter().map(|m| r.coeff(m)).collect())
    }
}

/// A computed twisted Zhu algebra.
#[derive(Clone, Debug)]
pub struct ReducedAlgebra {
    reduction: Reduction,
    basis: Vec<Monomial>,
    structure_constants: Vec<Vec<Vec<Rational>>>,
    identity_index: usize,
    omega: Option<Vec<Rational>>,
}

impl ReducedAlgebra {
    /// Dimension of the computed quotient.
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Standard monomials representing the basis classes.
    pub fn basis(&self) -> &[Monomial] {
        &self.basis
    }

    /// `c[i][j][k]` with `[b_i] * [b_j] = sum_k c[i][j][k] [b_k]`.
    pub fn structure_constants(&self) -> &[Vec<Vec<Rational>>] {
        &self.structure_constants
    }

    /// Index of `[1]`.
    pub fn identity_index(&self) -> usize {
        self.identity_index
    }

    /// Coordinates of `[omega]`, when `omega` lies in the window.
    pub fn omega(&self) -> Option<&[Rational]> {
        self.omega.as_deref()
    }

    /// The underlying reduction.
    pub fn reduction(&self) -> &Reduction {
        &self.reduction
    }

    /// Coordinates of the class of `u`.
    pub fn coordinates(&self, u: &GradedVector) -> Result<Vec<Rational>, ZhuError> {
        self.reduction.coordinates(u, &self.basis)
    }

    /// Product of two coordinate vectors.
    pub fn multiply(&self, x: &[Rational], y: &[Rational]) -> Vec<Rational> {
        let n = self.dim();
        let mut out = vec![Rational::zero(); n];
        for (xi, table) in x.iter().zip(&self.structure_constants) {
            if xi.is_zero() {
                continue;
            }
            for (yj, row) in y.iter().zip(table) {
                if yj.is_zero() {
                    continue;
                }
                let xy = xi * yj;
                for (o, c) in out.iter_mut().zip(row) {
                    *o += &xy * c;
                }
            }
        }
        out
    }

    /// True when the structure constants are associative and `[1]` is a two-sided unit.
    pub fn is_associative_unital(&self) -> bool {
        let n = self.dim();
        let e = |i: usize| (0..n).map(|k| if k == i { Rational::one() } else { Rational::zero() }).collect::<Vec<_>>();
        let one = e(self.identity_index);
        for i in 0..n {
            if self.multiply(&one, &e(i)) != e(i) || self.multiply(&e(i), &one) != e(i) {
                return false;
            }
            for j in 0..n {
                for k in 0..n {
                    let l = self.multiply(&self.multiply(&e(i), &e(j)), &e(k));
                    let r = self.multiply(&e(i), &self.multiply(&e(j), &e(k)));
                    if l != r {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// True when `[omega]` commutes with every basis class (vacuously true when it is outside the window).
    pub fn omega_is_central(&self) -> bool {
        let Some(w) = &self.omega else { return true };
        let n = self.dim();
        (0..n).all(|i| {
            let e: Vec<Rational> = (0..n).map(|k| if k == i { Rational::one() } else { Rational::zero() }).collect();
            self.multiply(w, &e) == self.multiply(&e, w)
        })
    }

    /// JSON rendering `{dim, basis, structure_constants}`.
    pub fn to_json(&self) -> Value {
        let form = self.reduction.module().voa().form();
        let mut sc = Vec::new();
        for (i, row) in self.structure_constants.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                for (k, c) in v.iter().enumerate() {
                    if !c.is_zero() {
                        sc.push(json!([i, j, k, fmt_q(c)]));
                    }
                }
            }
        }
        json!({
            "dim": self.dim(),
            "basis": self.basis.iter().map(|m| m.render(form)).collect::<Vec<_>>(),
            "structure_constants": sc,
        })
    }
}

/// Computes `A_g(V)` on a window.
pub fn quotient_algebra(voa: &VoaInstance, window: &TruncationWindow) -> Result<ReducedAlgebra, ZhuError> {
    quotient_algebra_with(voa, window, false)
}

/// Computes `A_g(V)` on a window, optionally with the `k = 1` relations.
pub fn quotient_algebra_with(voa: &VoaInstance, window: &TruncationWindow, k_family: bool) -> Result<ReducedAlgebra, ZhuError> {
    let adj = voa.adjoint();
    let reduction = Reduction::build(&adj, &BimoduleMode::Ag, window, k_family)?;
    let basis = reduction.standard_monomials();
    let n = basis.len();
    let mut structure_constants = vec![vec![vec![]; n]; n];
    for i in 0..n {
        let bi = GradedVector::basis(basis[i].clone());
        for j in 0..n {
            let bj = GradedVector::basis(basis[j].clone());
            let p = star_g(&adj, &bi, &bj)?;
            structure_constants[i][j] = reduction.coordinates(&p, &basis)?;
        }
    }
    let vac = Monomial::vacuum(voa.form().rank());
    let identity_index = basis.iter().position(|m| *m == vac).expect("the vacuum class never vanishes");
    let omega = if window.max_degree >= Exponent::int(2) { Some(reduction.coordinates(&voa.omega(), &basis)?) } else { None };
    Ok(ReducedAlgebra { reduction, basis, structure_constants, identity_index, omega })
}

/// A computed bimodule `A_g(M)` or `B_{g,lambda}(M)`.
#[derive(Clone, Debug)]
pub struct ReducedBimodule {
    reduction: Reduction,
    basis: Vec<Monomial>,
    left_action: Vec<Vec<Vec<Rational>>>,
    right_action: Vec<Vec<Vec<Rational>>>,
}

impl ReducedBimodule {
    /// Dimension of the computed quotient.
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Standard monomials representing the basis classes.
    pub fn basis(&self) -> &[Monomial] {
        &self.basis
    }

    /// `left[i][j]`: coordinates of `[b_i] * [u_j]` for algebra basis `b_i`.
    pub fn left_action(&self) -> &[Vec<Vec<Rational>>] {
        &self.left_action
    }

    /// `right[i][j]`: coordinates of `[u_j] * [b_i]`.
    pub fn right_action(&self) -> &[Vec<Vec<Rational>>] {
        &self.right_action
    }

    /// The underlying reduction.
    pub fn reduction(&self) -> &Reduction {
        &self.reduction
    }

    /// Coordinates of the class of `u`.
    pub fn coordinates(&self, u: &GradedVector) -> Result<Vec<Rational>, ZhuError> {
        self.reduction.coordinates(u, &self.basis)
    }

    /// True when the left and right actions commute on all basis triples.
    pub fn actions_commute(&self) -> bool {
        let na = self.left_action.len();
        let n = self.dim();
        let apply = |m: &Vec<Vec<Rational>>, x: &[Rational]| {
            let mut out = vec![Rational::zero(); n];
            for (j, xj) in x.iter().enumerate() {
                for k in 0..n {
                    out[k] += xj * &m[j][k];
                }
            }
            out
        };
        for a in 0..na {
            for b in 0..na {
                for j in 0..n {
                    let e: Vec<Rational> = (0..n).map(|k| if k == j { Rational::one() } else { Rational::zero() }).collect();
                    let l = apply(&self.left_action[a], &apply(&self.right_action[b], &e));
                    let r = apply(&self.right_action[b], &apply(&self.left_action[a], &e));
                    if l != r {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// JSON rendering `{dim, basis, left_action, right_action}`.
    pub fn to_json(&self, algebra: &ReducedAlgebra) -> Value {
        let form = self.reduction.module().voa().form();
        let mat = |m: &Vec<Vec<Vec<Rational>>>| -> Value {
            m.iter().map(|rows| rows.iter().map(|r| r.iter().map(fmt_q).collect::<Vec<_>>()).collect::<Vec<_>>()).collect::<Vec<_>>().into()
        };
        json!({
            "module": self.reduction.module().name(),
            "dim": self.dim(),
            "basis": self.basis.iter().map(|m| m.render(form)).collect::<Vec<_>>(),
            "algebra_basis": algebra.basis().iter().map(|m| m.render(form)).collect::<Vec<_>>(),
            "left_action": mat(&self.left_action),
            "right_action": mat(&self.right_action),
        })
    }
}

/// Computes `A_g(M)` or `B_{g,lambda}(M)` with its actions of a computed `A_g(V)`.
pub fn quotient_bimodule(module: &ModuleInstance, algebra: &ReducedAlgebra, mode: &BimoduleMode, window: &TruncationWindow) -> Result<ReducedBimodule, ZhuError> {
    let reduction = Reduction::build(module, mode, window, false)?;
    let basis = reduction.standard_monomials();
    let mut left_action = Vec::new();
    let mut right_action = Vec::new();
    for b in algebra.basis() {
        let bv = GradedVector::basis(b.clone());
        let mut l = Vec::new();
        let mut r = Vec::new();
        for u in &basis {
            let uv = GradedVector::basis(u.clone());
            l.push(reduction.coordinates(&star_g(module, &bv, &uv)?, &basis)?);
            r.push(reduction.coordinates(&right_star_g(module, &uv, &bv)?, &basis)?);
        }
        left_action.push(l);
        right_action.push(r);
    }
    Ok(ReducedBimodule { reduction, basis, left_action, right_action })
}

/// Report of the graded surjection `R(V) -> gr A_g(V)` on a window.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SurjectionReport {
    /// Number of `a_(-2) b` vectors checked to vanish in `gr`.
    pub c2_checked: usize,
    /// Number of products checked for multiplicativity.
    pub products_checked: usize,
    /// Per degree: `(degree, dim R(V)_m, dim gr_m A_g(V), rank of the induced map)`.
    pub degrees: Vec<(Exponent, usize, usize, usize)>,
    /// True when every check passed.
    pub holds: bool,
}

/// Checks that `a + C_2(V) -> [a] + A_g(V)_{m-1}` is a well-defined
/// surjective map of graded algebras within the window.
pub fn graded_surjection_check(voa: &VoaInstance, window: &TruncationWindow) -> Result<SurjectionReport, ZhuError> {
    let adj = voa.adjoint();
    let red = Reduction::build(&adj, &BimoduleMode::Ag, window, false)?;
    let n = window.max_degree;
    let sources = voa.eigenbasis(n);
    let targets: Vec<Monomial> = adj.basis(n);
    let mut holds = true;
    let mut c2_checked = 0;
    let mut products_checked = 0;
    let mut c2: Vec<GradedVector> = Vec::new();
    let below = |d: Option<Exponent>, m: Exponent| d.is_none_or(|d| d < m);
    for (_, a) in &sources {
        let wa = voa.weight(a)?;
        for b in &targets {
            let bv = GradedVector::basis(b.clone());
            let wb = adj.monomial_degree(b);
            if wa + wb + Exponent::int(1) <= n {
                let x = voa.nth_product(a, -2, &bv);
                c2_checked += 1;
                holds &= below(red.filtration_degree(&x)?, wa + wb + Exponent::int(1));
                c2.push(x);
            }
            if wa + wb <= n {
                let x = voa.nth_product(a, -1, &bv).sub(&star_g(&adj, a, &bv)?);
                products_checked += 1;
                holds &= below(red.filtration_degree(&x)?, wa + wb);
            }
        }
    }
    let mut degrees = Vec::new();
    let mut m = Exponent::zero();
    while m <= n {
        let level: Vec<Monomial> = targets.iter().filter(|b| adj.monomial_degree(b) == m).cloned().collect();
        let idx: HashMap<&Monomial, usize> = level.iter().enumerate().map(|(i, b)| (b, i)).collect();
        let mut c2_level = Echelon::new(level.len());
        for x in &c2 {
            let mut v = SparseVec::new();
            let mut inside = true;
            for (mono, c) in x.terms() {
                match idx.get(mono) {
                    Some(&i) => add_to(&mut v, i, c.clone()),
                    None => inside = false,
                }
            }
            if inside {
                c2_level.insert(v);
            }
        }
        let r_dim = level.len() - c2_level.rank();
        let std: Vec<Monomial> = red.standard_monomials().into_iter().filter(|b| adj.monomial_degree(b) == m).collect();
        let std_idx: HashMap<&Monomial, usize> = std.iter().enumerate().map(|(i, b)| (b, i)).collect();
        let mut image = Echelon::new(std.len());
        for b in &level {
            let r = red.reduce(&GradedVector::basis(b.clone()))?;
            let v: SparseVec = r.terms().filter_map(|(mono, c)| std_idx.get(mono).map(|&i| (i, c.clone()))).collect();
            image.insert(v);
        }
        holds &= image.rank() == std.len() && r_dim >= std.len();
        degrees.push((m, r_dim, std.len(), image.rank()));
        m += Exponent::int(1);
    }
    Ok(SurjectionReport { c2_checked, products_checked, degrees, holds })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;
    use crate::voa::{ModuleKind, Twist};

    #[test]
    fn vacuum_circle_vanishes_and_odd_generator_is_in_o() {
        let v = VoaInstance::heisenberg_rank_one(Twist::Theta);
        let adj = v.adjoint();
        let a = v.generator(0);
        assert!(circle_g(&adj, &v.vacuum(), &a).unwrap().is_zero());
        assert_eq!(circle_g(&adj, &a, &v.vacuum()).unwrap(), a);
    }

    #[test]
    fn heisenberg_zhu_algebra_is_one_dimensional() {
        let v = VoaInstance::heisenberg_rank_one(Twist::Theta);
        let a = quotient_algebra(&v, &TruncationWindow::new(Exponent::int(4))).unwrap();
        assert_eq!(a.dim(), 1);
        assert!(a.is_associative_unital());
        assert_eq!(a.omega().unwrap(), &[q(1, 16)]);
    }

    #[test]
    fn lattice_zhu_algebra() {
        let v = VoaInstance::lattice_a1(Twist::Theta);
        let a = quotient_algebra(&v, &TruncationWindow::new(Exponent::int(3))).unwrap();
        assert_eq!(a.dim(), 2);
        let e = a.coordinates(&v.exp_state(qi(1))).unwrap();
        let one = a.coordinates(&v.vacuum()).unwrap();
        assert_eq!(a.multiply(&e, &e), one.iter().map(|x| x * q(1, 16)).collect::<Vec<_>>());
        assert!(a.is_associative_unital());
        assert!(a.omega_is_central());
    }

    #[test]
    fn half_coset_relation() {
        let v = VoaInstance::lattice_a1(Twist::Theta);
        let w = TruncationWindow::new(Exponent::int(2));
        let alg = quotient_algebra(&v, &w).unwrap();
        let m = v.module(ModuleKind::HalfCoset);
        let b = quotient_bimodule(&m, &alg, &BimoduleMode::Ag, &w).unwrap();
        let e = v.exp_state(q(1, 2));
        let x = m.mode_action(&v.generator(0), Exponent::int(-1), &e).unwrap();
        assert_eq!(b.coordinates(&x).unwrap(), b.coordinates(&e.scale(&q(-1, 2))).unwrap());
        assert!(b.dim() <= 2);
    }
}
