//! Restricted conformal blocks and genus-zero twisted correlation functions.
//!
//! A [`BlockDatum`] fixes an untwisted module `M1` together with the bottom
//! levels `U2 = M2(0)` and `U3 = M3(0)^*` of two twisted modules.  A
//! restricted block is a functional on `U3 (x) M1 (x) U2` vanishing on the
//! relation space `J` spanned by
//!
//! ```text
//!   u3 (x) (L(-1) + L(0) - h1 + h) v (x) u2
//!   u3.[a] (x) v (x) u2 - sum_j binom(wt a, j)     u3 (x) a_(j-1) v (x) u2   (a in V^0)
//!   u3 (x) v (x) [a].u2 - sum_j binom(wt a - 1, j) u3 (x) a_(j-1) v (x) u2   (a in V^0)
//!   sum_j binom(wt a - 1 + r/T, j) u3 (x) a_(j-1) v (x) u2                   (a in V^r, r != 0)
//! ```
//!
//! with `h = h1 + h2 - h3`.  Blocks are computed exactly on a truncation
//! window ([`solve_blocks`]).  A block determines correlation functions
//! `S<u3 | (a1, z1) ... (an, zn) (v, w) | u2>` through the recursion
//!
//! ```text
//!   S = S<u3.[a] | ...> z^{-wt a}
//!     + sum_k sum_i F_{wt a - 1 + delta(r) + r/T, i}(z, z_k) S<... (a_(i) a_k, z_k) ...>
//!     + sum_i F_{wt a - 1 + delta(r) + r/T, i}(z, w) S<... (a_(i) v, w)>
//! ```
//!
//! (expansion from the left) or its mirror image with `[a].u2` and the
//! exponent `wt a - 1 + r/T` (expansion from the right).  The functions are
//! exact [`MultiPointFunction`] values, and every property check compares
//! rational functions exactly.
//!
//! ```
//! use voatwist::correlation::{solve_blocks, BlockDatum};
//! use voatwist::voa::{ModuleKind, Twist, VoaInstance};
//! use voatwist::zhu::TruncationWindow;
//! use voatwist::exponent::Exponent;
//! let v = VoaInstance::lattice_a1(Twist::Theta);
//! let datum = BlockDatum::new(
//!     v.module(ModuleKind::HalfCoset),
//!     v.module(ModuleKind::Twisted { sign: 1 }),
//!     v.module(ModuleKind::Twisted { sign: -1 }),
//!     TruncationWindow::new(Exponent::int(2)),
//! ).unwrap();
//! assert_eq!(solve_blocks(&datum).unwrap().dim(), 1);
//! ```

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, RwLock};

use num_traits::{One, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::exponent::Exponent;
use crate::kernels::f_kernel_between;
use crate::linalg::{add_to, rank, Echelon, SparseVec};
use crate::mpf::MultiPointFunction;
pub use crate::report::CheckReport;
use crate::rational::{binomial_coeff, qi, Rational};
use crate::series::{ExpansionSite, SeriesError};
use crate::voa::{GradedVector, ModuleInstance, Monomial, VoaError, VoaInstance};
use crate::zhu::{circle_g, homogeneous_parts, right_star_g, star_g, TruncationWindow, ZhuError};

/// A correlation function: a rational function in `z1, ..., zn, w`.
pub type CorrelationValue = MultiPointFunction;

/// Errors raised while solving blocks or evaluating correlation functions.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CorrelationError {
    /// An evaluation needs a degree beyond the truncation window.
    #[error("degree {degree} exceeds the block window {max}")]
    WindowExceeded {
        /// Degree that was requested.
        degree: Exponent,
        /// The window bound.
        max: Exponent,
    },
    /// The modules do not form a valid datum.
    #[error("invalid datum: {0}")]
    InvalidDatum(String),
    /// A vector of a twisted module is not reached by the modes used to extend a block.
    #[error("vector {0} is not reached by the extension")]
    NotGenerated(String),
    /// An error from the Zhu layer.
    #[error(transparent)]
    Zhu(#[from] ZhuError),
    /// An error from the vertex algebra layer.
    #[error(transparent)]
    Voa(#[from] VoaError),
    /// An error from series expansion.
    #[error(transparent)]
    Series(#[from] SeriesError),
}

/// Expansion side used to remove an insertion.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Side {
    /// Expansion from the left, through `U3`.
    Left,
    /// Expansion from the right, through `U2`.
    Right,
}

/// A route for a five-point function: the side for `a1`, then for `a2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Route {
    /// Left, then left.
    LL,
    /// Left, then right.
    LR,
    /// Right, then left.
    RL,
    /// Right, then right.
    RR,
}

impl Route {
    /// All four routes.
    pub const ALL: [Route; 4] = [Route::LL, Route::LR, Route::RL, Route::RR];

    /// The sides in recursion order.
    pub fn sides(self) -> [Side; 2] {
        match self {
            Route::LL => [Side::Left, Side::Left],
            Route::LR => [Side::Left, Side::Right],
            Route::RL => [Side::Right, Side::Left],
            Route::RR => [Side::Right, Side::Right],
        }
    }
}

/// An algebra insertion `(a, z)` at a named variable.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Insertion {
    /// Variable name.
    pub var: String,
    /// The inserted state of `V`.
    pub state: GradedVector,
}

impl Insertion {
    /// Inserts `state` at `var`.
    pub fn new(var: &str, state: GradedVector) -> Self {
        Insertion { var: var.to_string(), state }
    }
}

/// The datum `(U3, M1, U2)`: an untwisted module and the bottom levels of two
/// twisted modules.
#[derive(Clone, Debug)]
pub struct BlockDatum {
    m1: ModuleInstance,
    m2: ModuleInstance,
    m3: ModuleInstance,
    u2: Vec<Monomial>,
    u3: Vec<Monomial>,
    window: TruncationWindow,
}

impl BlockDatum {
    /// Builds the datum for `M1` with `U2 = M2(0)` and `U3 = M3(0)^*`.
    pub fn new(m1: ModuleInstance, m2: ModuleInstance, m3: ModuleInstance, window: TruncationWindow) -> Result<Self, CorrelationError> {
        if m1.is_twisted() || !m2.is_twisted() || !m3.is_twisted() {
            return Err(CorrelationError::InvalidDatum("M1 must be untwisted and M2, M3 twisted".into()));
        }
        if m1.voa() != m2.voa() || m1.voa() != m3.voa() {
            return Err(CorrelationError::InvalidDatum("modules over different algebras".into()));
        }
        let u2 = m2.bottom();
        let u3 = m3.bottom();
        Ok(BlockDatum { m1, m2, m3, u2, u3, window })
    }

    /// The algebra.
    pub fn voa(&self) -> &VoaInstance {
        self.m1.voa()
    }

    /// The untwisted module `M1`.
    pub fn m1(&self) -> &ModuleInstance {
        &self.m1
    }

    /// The twisted module whose bottom level is `U2`.
    pub fn m2(&self) -> &ModuleInstance {
        &self.m2
    }

    /// The twisted module whose dual bottom level is `U3`.
    pub fn m3(&self) -> &ModuleInstance {
        &self.m3
    }

    /// Basis of `U2`.
    pub fn u2_basis(&self) -> &[Monomial] {
        &self.u2
    }

    /// Basis of `U3` (dual to the bottom monomials of `M3`).
    pub fn u3_basis(&self) -> &[Monomial] {
        &self.u3
    }

    /// The truncation window on `M1`.
    pub fn window(&self) -> &TruncationWindow {
        &self.window
    }

    /// Bottom weight of `M1`.
    pub fn h1(&self) -> Rational {
        self.m1.conformal_weight()
    }

    /// Bottom weight of `M2`.
    pub fn h2(&self) -> Rational {
        self.m2.conformal_weight()
    }

    /// Bottom weight of `M3`.
    pub fn h3(&self) -> Rational {
        self.m3.conformal_weight()
    }

    /// `h = h1 + h2 - h3`.
    pub fn h(&self) -> Rational {
        self.h1() + self.h2() - self.h3()
    }

    /// Matrix of `o(a)` on a bottom level: `mat[k][l]` is the coefficient of
    /// `basis[k]` in `o(a) basis[l]`.
    fn zero_mode_matrix(module: &ModuleInstance, basis: &[Monomial], a: &GradedVector) -> Result<Vec<Vec<Rational>>, CorrelationError> {
        let mut mat = vec![vec![Rational::zero(); basis.len()]; basis.len()];
        for (l, m) in basis.iter().enumerate() {
            let image = module.zero_mode(a, &GradedVector::basis(m.clone()))?;
            for (k, row) in mat.iter_mut().enumerate() {
                row[l] = image.coeff(&basis[k]);
            }
        }
        Ok(mat)
    }

    /// `[a].u2` for `u2` given by coordinates.
    pub fn act_u2(&self, a: &GradedVector, u2: &[Rational]) -> Result<Vec<Rational>, CorrelationError> {
        let mat = Self::zero_mode_matrix(&self.m2, &self.u2, a)?;
        Ok(mat.iter().map(|row| row.iter().zip(u2).map(|(x, y)| x * y).sum()).collect())
    }

    /// `u3.[a]` for `u3` given by coordinates: `(u3.[a])(x) = u3(o(a) x)`.
    pub fn act_u3(&self, u3: &[Rational], a: &GradedVector) -> Result<Vec<Rational>, CorrelationError> {
        let mat = Self::zero_mode_matrix(&self.m3, &self.u3, a)?;
        Ok((0..self.u3.len()).map(|l| u3.iter().enumerate().map(|(k, x)| x * &mat[k][l]).sum()).collect())
    }

    /// True when `[omega]` acts by `h2` on `U2` and by `h3` on `U3`.
    pub fn omega_acts_by_weights(&self) -> Result<bool, CorrelationError> {
        let omega = self.voa().omega();
        for (basis, module, h) in [(&self.u2, &self.m2, self.h2()), (&self.u3, &self.m3, self.h3())] {
            let mat = Self::zero_mode_matrix(module, basis, &omega)?;
            for (k, row) in mat.iter().enumerate() {
                for (l, x) in row.iter().enumerate() {
                    let expected = if k == l { h.clone() } else { Rational::zero() };
                    if *x != expected {
                        return Ok(false);
                    }
                }
            }
        }
        Ok(true)
    }

    fn unit(n: usize, k: usize) -> Vec<Rational> {
        let mut v = vec![Rational::zero(); n];
        v[k] = Rational::one();
        v
    }
}

/// A vector of `U3 (x) M1 (x) U2`, keyed by `(u3 index, monomial, u2 index)`.
pub type Tensor = BTreeMap<(usize, Monomial, usize), Rational>;

fn tensor_add(t: &mut Tensor, u3: &[Rational], v: &GradedVector, u2: &[Rational], c: &Rational) {
    for (k3, x3) in u3.iter().enumerate().filter(|(_, x)| !x.is_zero()) {
        for (m, cv) in v.terms() {
            for (k2, x2) in u2.iter().enumerate().filter(|(_, x)| !x.is_zero()) {
                let e = t.entry((k3, m.clone(), k2)).or_insert_with(Rational::zero);
                *e += c * x3 * cv * x2;
                if e.is_zero() {
                    t.remove(&(k3, m.clone(), k2));
                }
            }
        }
    }
}

/// The generators of `J` whose components lie in the working window of the datum.
pub fn j_generators(datum: &BlockDatum) -> Result<Vec<Tensor>, CorrelationError> {
    let voa = datum.voa();
    let m1 = &datum.m1;
    let work = datum.window.working();
    let n3 = datum.u3.len();
    let n2 = datum.u2.len();
    let shift = datum.h() - datum.h1();
    let vs: Vec<(Exponent, GradedVector)> = m1.basis(work).into_iter().map(|m| (m1.monomial_degree(&m), GradedVector::basis(m))).collect();
    let mut out = Vec::new();
    for (dv, v) in &vs {
        if *dv + Exponent::int(1) > work {
            break;
        }
        let g = m1.l_minus_one(v).add(&m1.l_zero(v)).add(&v.scale(&shift));
        for k3 in 0..n3 {
            for k2 in 0..n2 {
                let mut t = Tensor::new();
                tensor_add(&mut t, &BlockDatum::unit(n3, k3), &g, &BlockDatum::unit(n2, k2), &Rational::one());
                out.push(t);
            }
        }
    }
    for (r, a) in voa.eigenbasis(work) {
        let wa = voa.weight(&a)?;
        for (dv, v) in &vs {
            if wa + *dv > work {
                break;
            }
            if r == 0 {
                let left = star_g(m1, &a, v)?;
                let right = right_star_g(m1, v, &a)?;
                for k3 in 0..n3 {
                    for k2 in 0..n2 {
                        let e3 = BlockDatum::unit(n3, k3);
                        let e2 = BlockDatum::unit(n2, k2);
                        let mut t = Tensor::new();
                        tensor_add(&mut t, &datum.act_u3(&e3, &a)?, v, &e2, &Rational::one());
                        tensor_add(&mut t, &e3, &left, &e2, &-Rational::one());
                        out.push(t);
                        let mut t = Tensor::new();
                        tensor_add(&mut t, &e3, v, &datum.act_u2(&a, &e2)?, &Rational::one());
                        tensor_add(&mut t, &e3, &right, &e2, &-Rational::one());
                        out.push(t);
                    }
                }
            } else {
                let g = circle_g(m1, &a, v)?;
                for k3 in 0..n3 {
                    for k2 in 0..n2 {
                        let mut t = Tensor::new();
                        tensor_add(&mut t, &BlockDatum::unit(n3, k3), &g, &BlockDatum::unit(n2, k2), &Rational::one());
                        out.push(t);
                    }
                }
            }
        }
    }
    Ok(out.into_iter().filter(|t| !t.is_empty()).collect())
}

/// The space of restricted blocks of a datum, computed on its window.
#[derive(Debug)]
pub struct BlockSpace {
    datum: BlockDatum,
    index: HashMap<(usize, Monomial, usize), usize>,
    degrees: Vec<Exponent>,
    echelon: Echelon,
    free: Vec<usize>,
    generators: usize,
    cache: RwLock<HashMap<(usize, Monomial, usize), SparseVec>>,
}

/// Solves for the restricted blocks: the functionals on the window that vanish on `J`.
///
/// Columns are ordered by descending degree of the `M1` component, so the
/// normal form of a vector never involves degrees above its own.
pub fn solve_blocks(datum: &BlockDatum) -> Result<Arc<BlockSpace>, CorrelationError> {
    let m1 = &datum.m1;
    let work = datum.window.working();
    let mut cols: Vec<(Exponent, Monomial)> = m1.basis(work).into_iter().map(|m| (m1.monomial_degree(&m), m)).collect();
    cols.sort_by(|(da, a), (db, b)| db.cmp(da).then(a.cmp(b)));
    let mut index = HashMap::new();
    let mut degrees = Vec::new();
    for (d, m) in &cols {
        for k3 in 0..datum.u3.len() {
            for k2 in 0..datum.u2.len() {
                index.insert((k3, m.clone(), k2), degrees.len());
                degrees.push(*d);
            }
        }
    }
    let mut echelon = Echelon::new(degrees.len());
    let gens = j_generators(datum)?;
    let generators = gens.len();
    for g in gens {
        let mut v = SparseVec::new();
        for (key, c) in g {
            let col = *index.get(&key).ok_or_else(|| CorrelationError::WindowExceeded { degree: m1.monomial_degree(&key.1), max: work })?;
            add_to(&mut v, col, c);
        }
        echelon.insert(v);
    }
    let max = datum.window.max_degree;
    let mut free: Vec<usize> = echelon.free_columns().into_iter().filter(|&c| degrees[c] <= max).collect();
    free.reverse();
    Ok(Arc::new(BlockSpace { datum: datum.clone(), index, degrees, echelon, free, generators, cache: RwLock::new(HashMap::new()) }))
}

impl BlockSpace {
    /// Dimension of the block space.
    pub fn dim(&self) -> usize {
        self.free.len()
    }

    /// The datum.
    pub fn datum(&self) -> &BlockDatum {
        &self.datum
    }

    /// Number of `J` generators used.
    pub fn generator_count(&self) -> usize {
        self.generators
    }

    /// Triples `(u3 index, monomial, u2 index)` indexing the block coordinates.
    pub fn standard_triples(&self) -> Vec<(usize, Monomial, usize)> {
        let mut inv: Vec<Option<&(usize, Monomial, usize)>> = vec![None; self.degrees.len()];
        for (k, &c) in &self.index {
            inv[c] = Some(k);
        }
        self.free.iter().map(|&c| inv[c].expect("column key").clone()).collect()
    }

    /// A basis of blocks, dual to the standard triples.
    pub fn blocks(self: &Arc<Self>) -> Vec<RestrictedBlock> {
        (0..self.dim())
            .map(|i| {
                let mut c = vec![Rational::zero(); self.dim()];
                c[i] = Rational::one();
                RestrictedBlock { space: Arc::clone(self), coefficients: c }
            })
            .collect()
    }

    fn normal_form(&self, k3: usize, m: &Monomial, k2: usize) -> Result<SparseVec, CorrelationError> {
        let key = (k3, m.clone(), k2);
        if let Some(v) = self.cache.read().expect("cache lock").get(&key) {
            return Ok(v.clone());
        }
        let max = self.datum.window.max_degree;
        let d = self.datum.m1.monomial_degree(m);
        let col = match self.index.get(&key) {
            Some(&c) if d <= max => c,
            _ => return Err(CorrelationError::WindowExceeded { degree: d, max }),
        };
        let nf = self.echelon.reduce(&SparseVec::from([(col, Rational::one())]));
        self.cache.write().expect("cache lock").insert(key, nf.clone());
        Ok(nf)
    }

    /// Vanishing of a tensor modulo `J` (within the window).
    pub fn in_relations(&self, t: &Tensor) -> Result<bool, CorrelationError> {
        let mut acc = SparseVec::new();
        for ((k3, m, k2), c) in t {
            for (col, x) in self.normal_form(*k3, m, *k2)? {
                add_to(&mut acc, col, c * x);
            }
        }
        Ok(acc.is_empty())
    }
}

/// A restricted block: a functional on `U3 (x) M1 (x) U2` vanishing on `J`.
#[derive(Clone, Debug)]
pub struct RestrictedBlock {
    space: Arc<BlockSpace>,
    coefficients: Vec<Rational>,
}

impl RestrictedBlock {
    /// The space this block belongs to.
    pub fn space(&self) -> &Arc<BlockSpace> {
        &self.space
    }

    /// The datum.
    pub fn datum(&self) -> &BlockDatum {
        &self.space.datum
    }

    /// Values on the standard triples.
    pub fn coefficients(&self) -> &[Rational] {
        &self.coefficients
    }

    /// `phi(u3 (x) v (x) u2)`.
    pub fn value(&self, u3: &[Rational], v: &GradedVector, u2: &[Rational]) -> Result<Rational, CorrelationError> {
        let mut t = Tensor::new();
        tensor_add(&mut t, u3, v, u2, &Rational::one());
        self.value_on(&t)
    }

    /// `phi` applied to a tensor.
    pub fn value_on(&self, t: &Tensor) -> Result<Rational, CorrelationError> {
        let mut out = Rational::zero();
        for ((k3, m, k2), c) in t {
            let nf = self.space.normal_form(*k3, m, *k2)?;
            for (i, col) in self.space.free.iter().enumerate() {
                if let Some(x) = nf.get(col) {
                    out += c * x * &self.coefficients[i];
                }
            }
        }
        Ok(out)
    }

    /// The correlation function with the given insertions, removed in list order
    /// with the given sides, as a function of `vars` (which must contain `w`).
    pub fn correlate(&self, u3: &[Rational], items: &[Insertion], v: &GradedVector, u2: &[Rational], plan: &[Side], vars: &[String]) -> Result<CorrelationValue, CorrelationError> {
        let datum = self.datum();
        let voa = datum.voa();
        let Some((first, rest)) = items.split_first() else {
            return self.three_point_in(u3, v, u2, vars);
        };
        let side = plan.first().copied().unwrap_or(Side::Left);
        let plan_rest = if plan.is_empty() { plan } else { &plan[1..] };
        let t = voa.order() as i64;
        let mut acc = MultiPointFunction::zero(vars.to_vec());
        for (r, a) in homogeneous_parts(voa, &first.state)? {
            let wa = voa.weight(&a)?;
            let delta = if r == 0 && side == Side::Left { 1 } else { 0 };
            let n = wa - Exponent::int(1) + Exponent::int(delta) + Exponent::new(r as i64, t);
            if r == 0 {
                let inner = match side {
                    Side::Left => self.correlate(&datum.act_u3(u3, &a)?, rest, v, u2, plan_rest, vars)?,
                    Side::Right => self.correlate(u3, rest, v, &datum.act_u2(&a, u2)?, plan_rest, vars)?,
                };
                acc = acc.add(&inner.mul(&MultiPointFunction::var_pow(vars.to_vec(), &first.var, -wa)));
            }
            for (k, other) in rest.iter().enumerate() {
                let top = max_weight(voa, &other.state)? + wa - Exponent::int(1);
                let mut i = 0u32;
                while Exponent::int(i as i64) <= top {
                    let b = voa.nth_product(&a, i as i64, &other.state);
                    if !b.is_zero() {
                        let mut replaced = rest.to_vec();
                        replaced[k].state = b;
                        let inner = self.correlate(u3, &replaced, v, u2, plan_rest, vars)?;
                        acc = acc.add(&inner.mul(&f_kernel_between(n, i, vars, &first.var, &other.var)));
                    }
                    i += 1;
                }
            }
            let top = datum.m1.truncation_bound(wa, v)?;
            let mut i = 0u32;
            while Exponent::int(i as i64) <= top {
                let y = datum.m1.mode_action(&a, Exponent::int(i as i64), v)?;
                if !y.is_zero() {
                    let inner = self.correlate(u3, rest, &y, u2, plan_rest, vars)?;
                    acc = acc.add(&inner.mul(&f_kernel_between(n, i, vars, &first.var, "w")));
                }
                i += 1;
            }
        }
        Ok(acc)
    }

    fn three_point_in(&self, u3: &[Rational], v: &GradedVector, u2: &[Rational], vars: &[String]) -> Result<CorrelationValue, CorrelationError> {
        let m1 = &self.datum().m1;
        let mut by_degree: BTreeMap<Exponent, GradedVector> = BTreeMap::new();
        for (m, c) in v.terms() {
            by_degree.entry(m1.monomial_degree(m)).or_default().add_term(m.clone(), c.clone());
        }
        let mut acc = MultiPointFunction::zero(vars.to_vec());
        for (d, part) in by_degree {
            let x = self.value(u3, &part, u2)?;
            if !x.is_zero() {
                acc = acc.add(&MultiPointFunction::var_pow(vars.to_vec(), "w", -d).scale(&x));
            }
        }
        Ok(acc)
    }
}

fn max_weight(voa: &VoaInstance, a: &GradedVector) -> Result<Exponent, CorrelationError> {
    let mut top = Exponent::zero();
    for (m, _) in a.terms() {
        top = top.max(voa.weight(&GradedVector::basis(m.clone()))?);
    }
    Ok(top)
}

fn names(xs: &[&str]) -> Vec<String> {
    xs.iter().map(|s| s.to_string()).collect()
}

/// `S<u3 | (v, w) | u2> = phi(u3 (x) v (x) u2) w^{-deg v}` on homogeneous `v`.
pub fn three_point(block: &RestrictedBlock, u3: &[Rational], v: &GradedVector, u2: &[Rational]) -> Result<CorrelationValue, CorrelationError> {
    block.correlate(u3, &[], v, u2, &[], &names(&["w"]))
}

/// `S<u3 | (a, z1) (v, w) | u2>` expanded from the given side.
pub fn four_point(block: &RestrictedBlock, u3: &[Rational], a: &GradedVector, v: &GradedVector, u2: &[Rational], side: Side) -> Result<CorrelationValue, CorrelationError> {
    block.correlate(u3, &[Insertion::new("z1", a.clone())], v, u2, &[side], &names(&["z1", "w"]))
}

/// `S<u3 | (a1, z1) (a2, z2) (v, w) | u2>` along a route.
#[allow(clippy::too_many_arguments)]
pub fn five_point(
    block: &RestrictedBlock,
    u3: &[Rational],
    a1: &GradedVector,
    a2: &GradedVector,
    v: &GradedVector,
    u2: &[Rational],
    route: Route,
) -> Result<CorrelationValue, CorrelationError> {
    let items = [Insertion::new("z1", a1.clone()), Insertion::new("z2", a2.clone())];
    block.correlate(u3, &items, v, u2, &route.sides(), &names(&["z1", "z2", "w"]))
}

/// `S<u3 | (a_1, z1) ... (a_n, zn) (v, w) | u2>` by the recursion from the left,
/// removing the insertions in the order given by `order` (a permutation of `0..n`).
pub fn n_point(block: &RestrictedBlock, u3: &[Rational], a_list: &[GradedVector], v: &GradedVector, u2: &[Rational], order: &[usize]) -> Result<CorrelationValue, CorrelationError> {
    let mut vars: Vec<String> = (1..=a_list.len()).map(|i| format!("z{i}")).collect();
    vars.push("w".into());
    let mut total = v.terms().map(|(m, _)| block.datum().m1.monomial_degree(m)).max().unwrap_or_else(Exponent::zero);
    for a in a_list {
        total += max_weight(block.datum().voa(), a)?;
    }
    let max = block.datum().window.max_degree;
    if total > max {
        return Err(CorrelationError::WindowExceeded { degree: total, max });
    }
    let items: Vec<Insertion> = order.iter().map(|&k| Insertion::new(&vars[k], a_list[k].clone())).collect();
    block.correlate(u3, &items, v, u2, &vec![Side::Left; items.len()], &vars)
}

/// Inputs for the property checks.
#[derive(Clone, Debug)]
pub struct Sample {
    /// Algebra states inserted at `z1`, `z2`.
    pub states: Vec<GradedVector>,
    /// Vectors of `M1` inserted at `w`.
    pub vectors: Vec<GradedVector>,
}

impl Sample {
    /// Eigenvectors of weight `<= 1` together with `omega`, and the monomials
    /// of `M1` of degree `<= max_degree`.
    pub fn standard(datum: &BlockDatum, max_degree: Exponent) -> Self {
        let voa = datum.voa();
        let mut states: Vec<GradedVector> = voa.eigenbasis(Exponent::int(1)).into_iter().map(|(_, a)| a).collect();
        states.push(voa.omega());
        let vectors = datum.m1.basis(max_degree).into_iter().map(GradedVector::basis).collect();
        Sample { states, vectors }
    }
}

fn units(n: usize) -> Vec<Vec<Rational>> {
    (0..n).map(|k| BlockDatum::unit(n, k)).collect()
}

fn pow_of_difference(vars: &[String], a: &str, b: &str, k: i64) -> MultiPointFunction {
    if k >= 0 {
        let i = vars.iter().position(|v| v == a).expect("variable");
        let j = vars.iter().position(|v| v == b).expect("variable");
        MultiPointFunction::from_poly(vars.to_vec(), crate::poly::Poly::diff(vars.len(), i, j).pow(k as u32))
    } else {
        MultiPointFunction::diagonal_pole(vars.to_vec(), a, b, (-k) as u32)
    }
}

/// Monomial property: `S<u3 | v | u2> w^{deg v}` is a constant equal to `phi(u3 (x) v (x) u2)`.
pub fn check_monomial(block: &RestrictedBlock, sample: &Sample) -> Result<CheckReport, CorrelationError> {
    let d = block.datum();
    let mut rep = CheckReport::new("monomial");
    for u3 in units(d.u3.len()) {
        for u2 in units(d.u2.len()) {
            for v in &sample.vectors {
                let s = three_point(block, &u3, v, &u2)?;
                let deg = d.m1.degree(v)?;
                let c = s.mul(&MultiPointFunction::var_pow(names(&["w"]), "w", deg)).as_constant();
                rep.record(c == Some(block.value(&u3, v, &u2)?));
            }
        }
    }
    Ok(rep)
}

/// Locality: four-point functions agree from both sides; five-point functions
/// agree along all routes and under exchange of the two insertions.
pub fn check_locality(block: &RestrictedBlock, sample: &Sample) -> Result<CheckReport, CorrelationError> {
    let d = block.datum();
    let mut rep = CheckReport::new("locality");
    let vars = names(&["z1", "z2", "w"]);
    for u3 in units(d.u3.len()) {
        for u2 in units(d.u2.len()) {
            for v in &sample.vectors {
                for a in &sample.states {
                    let l = four_point(block, &u3, a, v, &u2, Side::Left)?;
                    let r = four_point(block, &u3, a, v, &u2, Side::Right)?;
                    rep.record(l.rational_equal(&r));
                }
                for a1 in &sample.states {
                    for a2 in &sample.states {
                        let base = five_point(block, &u3, a1, a2, v, &u2, Route::LL)?;
                        for route in &Route::ALL[1..] {
                            rep.record(base.rational_equal(&five_point(block, &u3, a1, a2, v, &u2, *route)?));
                        }
                        let swapped = [Insertion::new("z2", a2.clone()), Insertion::new("z1", a1.clone())];
                        let other = block.correlate(&u3, &swapped, v, &u2, &[Side::Left, Side::Left], &vars)?;
                        rep.record(base.rational_equal(&other));
                    }
                }
            }
        }
    }
    Ok(rep)
}

/// Associativity: residues along `z1 = w` and `z1 = z2` against `(z1 - w)^k`,
/// `(z1 - z2)^k` reproduce the contracted functions, for `k` in `ks`.
pub fn check_associativity(block: &RestrictedBlock, sample: &Sample, ks: &[i64]) -> Result<CheckReport, CorrelationError> {
    let d = block.datum();
    let voa = d.voa();
    let mut rep = CheckReport::new("assoc");
    let zw = names(&["z1", "w"]);
    let zzw = names(&["z1", "z2", "w"]);
    let z2w = names(&["z2", "w"]);
    let at_w = ExpansionSite::AtDiagonal("z1".into(), "w".into());
    let at_z2 = ExpansionSite::AtDiagonal("z1".into(), "z2".into());
    for u3 in units(d.u3.len()) {
        for u2 in units(d.u2.len()) {
            for v in &sample.vectors {
                for a in &sample.states {
                    let s = four_point(block, &u3, a, v, &u2, Side::Left)?;
                    for &k in ks {
                        let lhs = s.mul(&pow_of_difference(&zw, "z1", "w", k)).residue_at(&at_w)?;
                        let rhs = three_point(block, &u3, &d.m1.mode_action(a, Exponent::int(k), v)?, &u2)?;
                        rep.record(lhs.rational_equal(&rhs));
                    }
                }
                for a1 in &sample.states {
                    for a2 in &sample.states {
                        let s = five_point(block, &u3, a1, a2, v, &u2, Route::LL)?;
                        for &k in ks {
                            let lhs = s.mul(&pow_of_difference(&zzw, "z1", "w", k)).residue_at(&at_w)?;
                            let contracted = d.m1.mode_action(a1, Exponent::int(k), v)?;
                            let rhs = block.correlate(&u3, &[Insertion::new("z2", a2.clone())], &contracted, &u2, &[Side::Left], &z2w)?;
                            rep.record(lhs.rational_equal(&rhs));
                            let lhs = s.mul(&pow_of_difference(&zzw, "z1", "z2", k)).residue_at(&at_z2)?;
                            let b = voa.nth_product(a1, k, a2);
                            let rhs = block.correlate(&u3, &[Insertion::new("z2", b)], v, &u2, &[Side::Left], &z2w)?;
                            rep.record(lhs.rational_equal(&rhs));
                        }
                    }
                }
            }
        }
    }
    Ok(rep)
}

/// `L(-1)`-derivative identities for three-, four- and five-point functions.
pub fn check_l_minus_one(block: &RestrictedBlock, sample: &Sample) -> Result<CheckReport, CorrelationError> {
    let d = block.datum();
    let voa = d.voa();
    let adj = voa.adjoint();
    let mut rep = CheckReport::new("l-1");
    let h = Exponent::from_rational(&d.h()).ok_or_else(|| CorrelationError::InvalidDatum("h is not a small fraction".into()))?;
    let w_h = |vars: &[String]| MultiPointFunction::var_pow(vars.to_vec(), "w", -h);
    let zw = names(&["z1", "w"]);
    let zzw = names(&["z1", "z2", "w"]);
    for u3 in units(d.u3.len()) {
        for u2 in units(d.u2.len()) {
            for v in &sample.vectors {
                let dv = d.m1.l_minus_one(v);
                let w1 = names(&["w"]);
                let lhs = three_point(block, &u3, &dv, &u2)?.mul(&w_h(&w1));
                let rhs = three_point(block, &u3, v, &u2)?.mul(&w_h(&w1)).derivative("w");
                rep.record(lhs.rational_equal(&rhs));
                for a in &sample.states {
                    let da = adj.l_minus_one(a);
                    let s = four_point(block, &u3, a, v, &u2, Side::Left)?;
                    rep.record(four_point(block, &u3, &da, v, &u2, Side::Left)?.rational_equal(&s.derivative("z1")));
                    let lhs = four_point(block, &u3, a, &dv, &u2, Side::Left)?.mul(&w_h(&zw));
                    rep.record(lhs.rational_equal(&s.mul(&w_h(&zw)).derivative("w")));
                }
                for a1 in &sample.states {
                    for a2 in &sample.states {
                        let s = five_point(block, &u3, a1, a2, v, &u2, Route::LL)?;
                        let lhs = five_point(block, &u3, &adj.l_minus_one(a1), a2, v, &u2, Route::LL)?;
                        rep.record(lhs.rational_equal(&s.derivative("z1")));
                        let lhs = five_point(block, &u3, a1, a2, &dv, &u2, Route::LL)?.mul(&w_h(&zzw));
                        rep.record(lhs.rational_equal(&s.mul(&w_h(&zzw)).derivative("w")));
                    }
                }
            }
        }
    }
    Ok(rep)
}

/// Vacuum property: inserting the vacuum anywhere changes nothing.
pub fn check_vacuum(block: &RestrictedBlock, sample: &Sample) -> Result<CheckReport, CorrelationError> {
    let d = block.datum();
    let one = d.voa().vacuum();
    let mut rep = CheckReport::new("vacuum");
    let zw = names(&["z1", "w"]);
    let zzw = names(&["z1", "z2", "w"]);
    for u3 in units(d.u3.len()) {
        for u2 in units(d.u2.len()) {
            for v in &sample.vectors {
                let s3 = three_point(block, &u3, v, &u2)?.embed(&zw);
                for side in [Side::Left, Side::Right] {
                    rep.record(four_point(block, &u3, &one, v, &u2, side)?.rational_equal(&s3));
                }
                for a in &sample.states {
                    let s4 = four_point(block, &u3, a, v, &u2, Side::Left)?.embed(&zzw);
                    for route in Route::ALL {
                        rep.record(five_point(block, &u3, a, &one, v, &u2, route)?.rational_equal(&s4));
                    }
                }
            }
        }
    }
    Ok(rep)
}

/// Monomial basis of a twisted module between two degrees, inclusive.
fn graded_piece(module: &ModuleInstance, lo: Exponent, hi: Exponent) -> Vec<Monomial> {
    module.basis(hi).into_iter().filter(|m| module.monomial_degree(m) >= lo).collect()
}

fn degree_steps(lo: Exponent, hi: Exponent, step: Exponent) -> Vec<Exponent> {
    let mut out = Vec::new();
    let mut d = lo;
    while d <= hi {
        out.push(d);
        d += step;
    }
    out
}

/// Flattens a function of `w` alone into `(column key, coefficient)` pairs.
/// A coefficient keyed by a tag pair and a power of `w`.
type TaggedTerm = ((usize, usize, Exponent), Rational);

fn flatten_w(f: &MultiPointFunction, tag: (usize, usize)) -> Result<Vec<TaggedTerm>, CorrelationError> {
    if !f.diagonal_poles().is_empty() {
        return Err(CorrelationError::InvalidDatum("residue keeps a diagonal pole".into()));
    }
    Ok(f.numerator().terms().map(|(m, c)| ((tag.0, tag.1, m[0]), c.clone())).collect())
}

/// Rows `[module vector | residues]` relating modes on a twisted module to
/// residues of four-point functions.
struct ExtensionRows {
    vec_index: HashMap<Monomial, usize>,
    vec_basis: Vec<Monomial>,
    s_index: HashMap<(usize, usize, Exponent), usize>,
    rows: Vec<SparseVec>,
}

impl ExtensionRows {
    fn new(basis: Vec<Monomial>) -> Self {
        let vec_index = basis.iter().enumerate().map(|(i, m)| (m.clone(), i)).collect();
        ExtensionRows { vec_index, vec_basis: basis, s_index: HashMap::new(), rows: Vec::new() }
    }

    fn s_column(&mut self, key: (usize, usize, Exponent)) -> usize {
        let n = self.s_index.len();
        *self.s_index.entry(key).or_insert(n)
    }

    fn push(&mut self, vec_part: &[(Monomial, Rational)], s_part: Vec<((usize, usize, Exponent), Rational)>) {
        let mut row = SparseVec::new();
        for (m, c) in vec_part {
            add_to(&mut row, self.vec_index[m], c.clone());
        }
        let offset = self.vec_basis.len();
        for (key, c) in s_part {
            let col = self.s_column(key);
            add_to(&mut row, offset + col, c);
        }
        self.rows.push(row);
    }

    fn consistent(&self) -> bool {
        let total = self.vec_basis.len() + self.s_index.len();
        let offset = self.vec_basis.len();
        let vec_only = self.rows.iter().map(|r| r.range(..offset).map(|(c, x)| (*c, x.clone())).collect::<SparseVec>());
        rank(self.rows.iter().cloned(), total) == rank(vec_only, total)
    }
}

/// Generating properties at the `M2` side and at the `M3` side up to `depth`.
///
/// At `M2`, `Res_{z1=0} S<u3 | (a, z1)(x, w) | u2> z1^m` is the correlation
/// function with `a_(m) u2` in place of `u2`: it vanishes when `a_(m) u2` has
/// negative degree, equals the bottom-level function for the zero mode, and
/// depends only on the vector `a_(m) u2` of `M2` up to `depth` (rank test).
/// At `M3` the residue at `z1 = infinity` against `z1^n` plays the same role
/// with the functional `u3(a_(n) .)` on `M3`.
pub fn check_generating(block: &RestrictedBlock, sample: &Sample, depth: Exponent) -> Result<CheckReport, CorrelationError> {
    let d = block.datum();
    let voa = d.voa();
    let t = voa.order() as i64;
    let half = Exponent::new(1, t);
    let mut rep = CheckReport::new("generating");
    let sources = voa.eigenbasis(Exponent::int(2));
    let zw = names(&["z1", "w"]);
    let w1 = names(&["w"]);
    let at0 = ExpansionSite::AtZero("z1".into());
    let atinf = ExpansionSite::AtInfinity("z1".into());
    let e2s = units(d.u2.len());
    let e3s = units(d.u3.len());
    let mut m2_rows = ExtensionRows::new(graded_piece(&d.m2, Exponent::zero(), depth));
    let mut m3_rows = ExtensionRows::new(graded_piece(&d.m3, Exponent::zero(), depth));
    for (r, a) in &sources {
        let wa = voa.weight(a)?;
        let mut fours: HashMap<(usize, usize, usize), MultiPointFunction> = HashMap::new();
        for (xi, x) in sample.vectors.iter().enumerate() {
            for (k3, u3) in e3s.iter().enumerate() {
                for (k2, u2) in e2s.iter().enumerate() {
                    fours.insert((xi, k3, k2), four_point(block, u3, a, x, u2, Side::Left)?);
                }
            }
        }
        for target_degree in degree_steps(-Exponent::int(1), depth, half) {
            let m = wa - Exponent::int(1) - target_degree;
            let n = wa - Exponent::int(1) + target_degree;
            if !(m - Exponent::new(*r as i64, t)).is_integer() {
                continue;
            }
            for (k2, u2m) in d.u2.iter().enumerate() {
                let target = d.m2.mode_action(a, m, &GradedVector::basis(u2m.clone()))?;
                let mut s_part = Vec::new();
                for (xi, x) in sample.vectors.iter().enumerate() {
                    for (k3, u3) in e3s.iter().enumerate() {
                        let res = fours[&(xi, k3, k2)].mul(&MultiPointFunction::var_pow(zw.clone(), "z1", m)).residue_at(&at0)?;
                        if target_degree < Exponent::zero() {
                            rep.record(res.is_zero());
                        } else if target_degree == Exponent::zero() {
                            let coords: Vec<Rational> = d.u2.iter().map(|b| target.coeff(b)).collect();
                            rep.record(res.rational_equal(&block.correlate(u3, &[], x, &coords, &[], &w1)?));
                        }
                        s_part.extend(flatten_w(&res, (xi, k3))?);
                    }
                }
                if target_degree >= Exponent::zero() {
                    let vec_part: Vec<(Monomial, Rational)> = target.terms().map(|(m, c)| (m.clone(), c.clone())).collect();
                    m2_rows.push(&vec_part, s_part);
                }
            }
            for (k3, u3m) in d.u3.iter().enumerate() {
                let mut vec_part = Vec::new();
                if target_degree >= Exponent::zero() {
                    for y in graded_piece(&d.m3, target_degree, target_degree) {
                        let c = d.m3.mode_action(a, n, &GradedVector::basis(y.clone()))?.coeff(u3m);
                        if !c.is_zero() {
                            vec_part.push((y, c));
                        }
                    }
                }
                let mut s_part = Vec::new();
                for (xi, x) in sample.vectors.iter().enumerate() {
                    for (k2, u2) in e2s.iter().enumerate() {
                        let res = fours[&(xi, k3, k2)].mul(&MultiPointFunction::var_pow(zw.clone(), "z1", n)).residue_at(&atinf)?;
                        if target_degree < Exponent::zero() {
                            rep.record(res.is_zero());
                        } else if target_degree == Exponent::zero() {
                            let u3a = d.act_u3(&e3s[k3], a)?;
                            rep.record(res.rational_equal(&block.correlate(&u3a, &[], x, u2, &[], &w1)?));
                        }
                        s_part.extend(flatten_w(&res, (xi, k2))?);
                    }
                }
                if target_degree >= Exponent::zero() {
                    m3_rows.push(&vec_part, s_part);
                }
            }
        }
    }
    rep.record(m2_rows.consistent());
    rep.record(m3_rows.consistent());
    Ok(rep)
}

/// Runs every property check on one block.
pub fn check_all(block: &RestrictedBlock, sample: &Sample) -> Result<Vec<CheckReport>, CorrelationError> {
    Ok(vec![
        check_monomial(block, sample)?,
        check_locality(block, sample)?,
        check_associativity(block, sample, &[-2, -1, 0, 1, 2, 3])?,
        check_l_minus_one(block, sample)?,
        check_vacuum(block, sample)?,
        check_generating(block, sample, Exponent::int(1))?,
    ])
}

/// The pairing `S<u3 | (x, w) | y>` for `y` in `M2` up to a depth, obtained
/// from residues of four-point functions at `z1 = 0`.
#[derive(Debug)]
pub struct M2Extension {
    xs: Vec<Monomial>,
    ys: Vec<Monomial>,
    y_index: HashMap<Monomial, usize>,
    s_keys: Vec<(usize, usize, Exponent)>,
    echelon: Echelon,
    depth: Exponent,
}

/// Extends a block to `M2` up to `depth` for all `x` among the monomials of
/// `M1` of degree `<= x_degree`, using sources of weight `<= source_weight`.
pub fn m2_extension(block: &RestrictedBlock, x_degree: Exponent, depth: Exponent, source_weight: Exponent) -> Result<M2Extension, CorrelationError> {
    let d = block.datum();
    let voa = d.voa();
    let t = voa.order() as i64;
    let xs = d.m1.basis(x_degree);
    let ys = graded_piece(&d.m2, Exponent::zero(), depth);
    let mut rows = ExtensionRows::new(ys.clone());
    let zw = names(&["z1", "w"]);
    let at0 = ExpansionSite::AtZero("z1".into());
    let e3s = units(d.u3.len());
    for (r, a) in voa.eigenbasis(source_weight) {
        let wa = voa.weight(&a)?;
        for (k2, u2) in d.u2.iter().enumerate() {
            let e2 = BlockDatum::unit(d.u2.len(), k2);
            let fours: Vec<Vec<MultiPointFunction>> = xs
                .iter()
                .map(|x| e3s.iter().map(|u3| four_point(block, u3, &a, &GradedVector::basis(x.clone()), &e2, Side::Left)).collect::<Result<Vec<_>, _>>())
                .collect::<Result<_, _>>()?;
            for dd in degree_steps(Exponent::zero(), depth, Exponent::new(1, t)) {
                let m = wa - Exponent::int(1) - dd;
                if !(m - Exponent::new(r as i64, t)).is_integer() {
                    continue;
                }
                let target = d.m2.mode_action(&a, m, &GradedVector::basis(u2.clone()))?;
                if target.is_zero() {
                    continue;
                }
                let mut s_part = Vec::new();
                for (xi, row) in fours.iter().enumerate() {
                    for (k3, f) in row.iter().enumerate() {
                        let res = f.mul(&MultiPointFunction::var_pow(zw.clone(), "z1", m)).residue_at(&at0)?;
                        s_part.extend(flatten_w(&res, (xi, k3))?);
                    }
                }
                let vec_part: Vec<(Monomial, Rational)> = target.terms().map(|(m, c)| (m.clone(), c.clone())).collect();
                rows.push(&vec_part, s_part);
            }
        }
    }
    let offset = rows.vec_basis.len();
    let mut s_keys = vec![(0, 0, Exponent::zero()); rows.s_index.len()];
    for (k, &i) in &rows.s_index {
        s_keys[i] = *k;
    }
    let mut echelon = Echelon::new(offset + s_keys.len());
    for row in rows.rows {
        echelon.insert(row);
    }
    let y_index = rows.vec_index;
    Ok(M2Extension { xs, ys, y_index, s_keys, echelon, depth })
}

impl M2Extension {
    /// The monomials `y` of `M2` covered.
    pub fn targets(&self) -> &[Monomial] {
        &self.ys
    }

    /// The depth of the extension.
    pub fn depth(&self) -> Exponent {
        self.depth
    }

    /// True when the residues depend only on the module vectors.
    pub fn is_consistent(&self) -> bool {
        let offset = self.ys.len();
        self.echelon.pivots().all(|p| p < offset)
    }

    /// `S<e_k3 | (x, w) | y>` as a function of `w`, for `x` a combination of covered monomials.
    pub fn pairing(&self, k3: usize, x: &GradedVector, y: &Monomial) -> Result<MultiPointFunction, CorrelationError> {
        let w1 = names(&["w"]);
        let col = *self.y_index.get(y).ok_or_else(|| CorrelationError::NotGenerated(format!("{y:?}")))?;
        let nf = self.echelon.reduce(&SparseVec::from([(col, Rational::one())]));
        let offset = self.ys.len();
        if nf.range(..offset).next().is_some() {
            return Err(CorrelationError::NotGenerated(format!("{y:?}")));
        }
        let mut acc = MultiPointFunction::zero(w1.clone());
        for (m, c) in x.terms() {
            let xi = self.xs.iter().position(|z| z == m).ok_or_else(|| CorrelationError::NotGenerated(format!("{m:?}")))?;
            for (s, val) in nf.range(offset..) {
                let (kx, kk, e) = self.s_keys[s - offset];
                if kx == xi && kk == k3 {
                    acc = acc.add(&MultiPointFunction::var_pow(w1.clone(), "w", e).scale(&(-(val * c))));
                }
            }
        }
        Ok(acc)
    }
}

impl M2Extension {
    /// The mode coefficient `<e_k3, x_(p) y>` carried by the pairing, for homogeneous `x`.
    pub fn coefficient(&self, k3: usize, x: &GradedVector, y: &Monomial) -> Result<Rational, CorrelationError> {
        Ok(self.pairing(k3, x, y)?.numerator().terms().map(|(_, c)| c.clone()).sum())
    }
}

/// A matrix of an intertwiner mode `v_(n)` from `M2(d)` to the bottom of `M3`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModeMatrix {
    /// Degree `d` of the source piece.
    pub source_degree: Exponent,
    /// Mode index `n`.
    pub mode: Exponent,
    /// `matrix[k3][j] = <e_k3, v_(n) y_j>`.
    pub matrix: Vec<Vec<Rational>>,
}

/// Matrices of the modes of the intertwining operator attached to a block,
/// from `M2` up to `ext`'s depth into the bottom level of `M3`.
///
/// The coefficient of `w^{-n-1}` in `S<u3 | (v, w) | y> w^{-h}` is `<u3, v_(n) y>`.
pub fn intertwiner_modes(block: &RestrictedBlock, ext: &M2Extension, v: &GradedVector) -> Result<Vec<ModeMatrix>, CorrelationError> {
    let d = block.datum();
    let h = Exponent::from_rational(&d.h()).ok_or_else(|| CorrelationError::InvalidDatum("h is not a small fraction".into()))?;
    let dv = d.m1.degree(v)?;
    let mut by_degree: BTreeMap<Exponent, Vec<Monomial>> = BTreeMap::new();
    for y in &ext.ys {
        by_degree.entry(d.m2.monomial_degree(y)).or_default().push(y.clone());
    }
    let mut out = Vec::new();
    for (deg, ys) in by_degree {
        let e = -dv - deg - h;
        let mode = -e - Exponent::int(1);
        let mut matrix = vec![vec![Rational::zero(); ys.len()]; d.u3.len()];
        for (k3, row) in matrix.iter_mut().enumerate() {
            for (j, y) in ys.iter().enumerate() {
                let f = ext.pairing(k3, v, y)?;
                let shifted = f.mul(&MultiPointFunction::var_pow(names(&["w"]), "w", -h));
                for (m, c) in shifted.numerator().terms() {
                    if m[0] != e {
                        return Err(CorrelationError::InvalidDatum("pairing is not homogeneous".into()));
                    }
                    row[j] = c.clone();
                }
            }
        }
        out.push(ModeMatrix { source_degree: deg, mode, matrix });
    }
    Ok(out)
}

/// The commutator of a zero mode with the intertwiner on the extension:
/// `<u3.[a], v_(n) y> - <u3, v_(n) o(a) y> = sum_j binom(wt a - 1, j) <u3, (a_(j) v)_(wt a - 1 + n - j) y>`
/// for `a` in `V^0`, checked as an identity of pairings.
pub fn check_intertwiner_commutator(block: &RestrictedBlock, ext: &M2Extension, states: &[GradedVector], vectors: &[GradedVector]) -> Result<CheckReport, CorrelationError> {
    let d = block.datum();
    let voa = d.voa();
    let mut rep = CheckReport::new("intertwiner-commutator");
    let e3s = units(d.u3.len());
    for a0 in states {
        for (r, a) in homogeneous_parts(voa, a0)? {
            if r != 0 {
                continue;
            }
            let wa = voa.weight(&a)?;
            for v in vectors {
                for (k3, u3) in e3s.iter().enumerate() {
                    let u3a = d.act_u3(u3, &a)?;
                    for y in &ext.ys {
                        let mut lhs = Rational::zero();
                        for (k, c) in u3a.iter().enumerate() {
                            if !c.is_zero() {
                                lhs += c * ext.coefficient(k, v, y)?;
                            }
                        }
                        let oy = d.m2.zero_mode(&a, &GradedVector::basis(y.clone()))?;
                        for (m, c) in oy.terms() {
                            lhs -= c * ext.coefficient(k3, v, m)?;
                        }
                        let mut rhs = Rational::zero();
                        let top = d.m1.truncation_bound(wa, v)?;
                        let mut j = 0u32;
                        while Exponent::int(j as i64) <= top {
                            let c = binomial_coeff(&(wa.to_rational() - qi(1)), j);
                            let x = d.m1.mode_action(&a, Exponent::int(j as i64), v)?;
                            if !c.is_zero() && !x.is_zero() {
                                rhs += c * ext.coefficient(k3, &x, y)?;
                            }
                            j += 1;
                        }
                        rep.record(lhs == rhs);
                    }
                }
            }
        }
    }
    Ok(rep)
}
