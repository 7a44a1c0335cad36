//! Fusion rules from tensor products over the twisted Zhu algebra.
//!
//! For an untwisted module `M1` and twisted modules `M2`, `M3` with bottom
//! levels `U2`, `U3`, the fusion rule is the dimension of
//!
//! ```text
//!   U3 (x)_A B (x)_A U2 = (U3 (x) B (x) U2) / span{ u.a (x) b (x) v - u (x) a.b (x) v,
//!                                                    u (x) b.a (x) v - u (x) b (x) a.v }
//! ```
//!
//! with `A = A_g(V)` and `B = A_g(M1)`.  The same number is obtained from the
//! restricted conformal blocks of [`crate::correlation`]; [`cross_validate`]
//! compares the two routes.
//!
//! ```
//! use voatwist::fusion::{fusion_rule, FusionQuery};
//! use voatwist::voa::{ModuleKind, Twist, VoaInstance};
//! use voatwist::zhu::TruncationWindow;
//! use voatwist::exponent::Exponent;
//! let v = VoaInstance::lattice_a1(Twist::Theta);
//! let q = FusionQuery::new(
//!     v.module(ModuleKind::Adjoint),
//!     v.module(ModuleKind::Twisted { sign: 1 }),
//!     v.module(ModuleKind::Twisted { sign: 1 }),
//! );
//! let r = fusion_rule(&q, &TruncationWindow::new(Exponent::int(2))).unwrap();
//! assert_eq!(r.dimension, 1);
//! ```

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use num_traits::Zero;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};
use thiserror::Error;

use crate::correlation::{solve_blocks, BlockDatum, CorrelationError};
use crate::exponent::Exponent;
use crate::linalg::{add_to, rank, SparseVec};
use crate::rational::{fmt_q, q, Rational};
use crate::voa::{GradedVector, ModuleInstance, ModuleKind, Monomial, Twist, VoaInstance};
use crate::zhu::{quotient_algebra, quotient_bimodule, BimoduleMode, ReducedAlgebra, ReducedBimodule, TruncationWindow, ZhuError};

/// Errors raised while computing fusion rules.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FusionError {
    /// The two routes disagree.
    #[error("tensor route gives {tensor}, block route gives {blocks}")]
    Mismatch {
        /// Dimension from the tensor product.
        tensor: usize,
        /// Dimension of the block space.
        blocks: usize,
    },
    /// An error from the Zhu layer.
    #[error(transparent)]
    Zhu(#[from] ZhuError),
    /// An error from the block solver.
    #[error(transparent)]
    Correlation(#[from] CorrelationError),
}

/// A fusion query: the untwisted module `M1`, the twisted modules `M2`, `M3`,
/// and the bimodule used in the tensor product.
#[derive(Clone, Debug)]
pub struct FusionQuery {
    /// The untwisted module.
    pub m1: ModuleInstance,
    /// The source twisted module.
    pub m2: ModuleInstance,
    /// The target twisted module.
    pub m3: ModuleInstance,
    /// `A_g(M1)` or `B_{g,lambda}(M1)`.
    pub mode: BimoduleMode,
}

impl FusionQuery {
    /// Query with the bimodule `A_g(M1)`.
    pub fn new(m1: ModuleInstance, m2: ModuleInstance, m3: ModuleInstance) -> Self {
        FusionQuery { m1, m2, m3, mode: BimoduleMode::Ag }
    }

    /// The same query with another bimodule.
    pub fn with_mode(&self, mode: BimoduleMode) -> Self {
        FusionQuery { mode, ..self.clone() }
    }

    /// `h2 - h3`.
    pub fn weight_gap(&self) -> Rational {
        self.m2.conformal_weight() - self.m3.conformal_weight()
    }

    /// A label such as `(V_L; V_L^T+ -> V_L^T-)`.
    pub fn label(&self) -> String {
        format!("({}; {} -> {})", self.m1.name(), self.m2.name(), self.m3.name())
    }
}

/// Matrices of the algebra basis acting on a bottom level.
///
/// `left[i][k][l]` is the coefficient of `e_k` in `[b_i].e_l` on `U2`;
/// `right[i][k][l]` is the coefficient of `e_k` in `o(b_i) e_l` on the bottom
/// of `M3`, so that `(u3.[b_i])_l = sum_k u3_k right[i][k][l]`.
fn bottom_matrices(algebra: &ReducedAlgebra, module: &ModuleInstance) -> Result<Vec<Vec<Vec<Rational>>>, ZhuError> {
    let basis = module.bottom();
    let mut out = Vec::new();
    for b in algebra.basis() {
        let bv = GradedVector::basis(b.clone());
        let mut mat = vec![vec![Rational::zero(); basis.len()]; basis.len()];
        for (l, m) in basis.iter().enumerate() {
            let image = module.zero_mode(&bv, &GradedVector::basis(m.clone()))?;
            for (k, row) in mat.iter_mut().enumerate() {
                row[l] = image.coeff(&basis[k]);
            }
        }
        out.push(mat);
    }
    Ok(out)
}

/// Dimension of `U3 (x)_A B (x)_A U2` given the action matrices of the
/// algebra basis on `U3` (right) and `U2` (left).
#[allow(clippy::needless_range_loop)]
pub fn tensor_over_algebra(u3_right: &[Vec<Vec<Rational>>], b: &ReducedBimodule, u2_left: &[Vec<Vec<Rational>>]) -> usize {
    let n3 = u3_right.first().map_or(0, |m| m.len());
    let n2 = u2_left.first().map_or(0, |m| m.len());
    let nb = b.dim();
    let col = |k3: usize, j: usize, k2: usize| (k3 * nb + j) * n2 + k2;
    let total = n3 * nb * n2;
    let mut rows: Vec<SparseVec> = Vec::new();
    for i in 0..u3_right.len() {
        for k3 in 0..n3 {
            for j in 0..nb {
                for k2 in 0..n2 {
                    let mut left = SparseVec::new();
                    for l in 0..n3 {
                        add_to(&mut left, col(l, j, k2), u3_right[i][k3][l].clone());
                    }
                    for (jj, c) in b.left_action()[i][j].iter().enumerate() {
                        add_to(&mut left, col(k3, jj, k2), -c.clone());
                    }
                    rows.push(left);
                    let mut right = SparseVec::new();
                    for (jj, c) in b.right_action()[i][j].iter().enumerate() {
                        add_to(&mut right, col(k3, jj, k2), c.clone());
                    }
                    for l in 0..n2 {
                        add_to(&mut right, col(k3, j, l), -u2_left[i][l][k2].clone());
                    }
                    rows.push(right);
                }
            }
        }
    }
    total - rank(rows, total)
}

fn voa_key(voa: &VoaInstance) -> String {
    format!("{:?}/{:?}/{:?}", voa.kind(), voa.twist(), voa.form())
}

/// Memoized algebras and bimodules keyed by query and window.
#[derive(Debug, Default)]
pub struct FusionCache {
    algebras: Mutex<HashMap<(String, TruncationWindow), Arc<ReducedAlgebra>>>,
    bimodules: Mutex<HashMap<(String, String, TruncationWindow), Arc<ReducedBimodule>>>,
}

impl FusionCache {
    /// An empty cache.
    pub fn new() -> Self {
        FusionCache::default()
    }

    /// `A_g(V)` for the algebra of `m1`.
    pub fn algebra(&self, voa: &VoaInstance, window: &TruncationWindow) -> Result<Arc<ReducedAlgebra>, FusionError> {
        let key = (voa_key(voa), *window);
        if let Some(a) = self.algebras.lock().expect("cache lock").get(&key) {
            return Ok(Arc::clone(a));
        }
        let a = Arc::new(quotient_algebra(voa, window)?);
        self.algebras.lock().expect("cache lock").insert(key, Arc::clone(&a));
        Ok(a)
    }

    /// The bimodule of a query.
    pub fn bimodule(&self, query: &FusionQuery, window: &TruncationWindow) -> Result<Arc<ReducedBimodule>, FusionError> {
        let key = (format!("{}/{}", voa_key(query.m1.voa()), query.m1.name()), format!("{:?}", query.mode), *window);
        if let Some(b) = self.bimodules.lock().expect("cache lock").get(&key) {
            return Ok(Arc::clone(b));
        }
        let algebra = self.algebra(query.m1.voa(), window)?;
        let b = Arc::new(quotient_bimodule(&query.m1, &algebra, &query.mode, window)?);
        self.bimodules.lock().expect("cache lock").insert(key, Arc::clone(&b));
        Ok(b)
    }

    /// Tensor dimension of a query at one window.
    pub fn tensor_dimension(&self, query: &FusionQuery, window: &TruncationWindow) -> Result<usize, FusionError> {
        let algebra = self.algebra(query.m1.voa(), window)?;
        let b = self.bimodule(query, window)?;
        let left = bottom_matrices(&algebra, &query.m2)?;
        let right = bottom_matrices(&algebra, &query.m3)?;
        Ok(tensor_over_algebra(&right, &b, &left))
    }

    /// The fusion rule with its stability flag.
    pub fn fusion_rule(&self, query: &FusionQuery, window: &TruncationWindow) -> Result<FusionRule, FusionError> {
        let dimension = self.tensor_dimension(query, window)?;
        let next = TruncationWindow::with_slack(window.max_degree + Exponent::int(1), window.slack);
        let stable = self.tensor_dimension(query, &next)? == dimension;
        Ok(FusionRule { dimension, stable })
    }
}

/// Tensor dimension of a query at one window.
pub fn tensor_dimension(query: &FusionQuery, window: &TruncationWindow) -> Result<usize, FusionError> {
    FusionCache::new().tensor_dimension(query, window)
}

/// A fusion rule with its stability flag.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FusionRule {
    /// The tensor dimension at the requested window.
    pub dimension: usize,
    /// True when the next window gives the same value.
    pub stable: bool,
}

/// The fusion rule by the tensor route, with stability under enlarging the window by one.
pub fn fusion_rule(query: &FusionQuery, window: &TruncationWindow) -> Result<FusionRule, FusionError> {
    FusionCache::new().fusion_rule(query, window)
}

/// Tensor dimensions over `B_{g,lambda1}`, `B_{g,lambda2}` and `A_g`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LambdaReport {
    /// Dimension with `B_{g,lambda1}`.
    pub first: usize,
    /// Dimension with `B_{g,lambda2}`.
    pub second: usize,
    /// Dimension with `A_g`.
    pub plain: usize,
}

impl LambdaReport {
    /// True when the three dimensions coincide.
    pub fn agree(&self) -> bool {
        self.first == self.second && self.second == self.plain
    }
}

/// Compares the tensor dimensions over `B_{g,lambda1}`, `B_{g,lambda2}` and `A_g`.
pub fn lambda_insensitivity(query: &FusionQuery, lambda1: &Rational, lambda2: &Rational, window: &TruncationWindow) -> Result<LambdaReport, FusionError> {
    lambda_insensitivity_cached(&FusionCache::new(), query, lambda1, lambda2, window)
}

/// [`lambda_insensitivity`] sharing a cache.
pub fn lambda_insensitivity_cached(cache: &FusionCache, query: &FusionQuery, lambda1: &Rational, lambda2: &Rational, window: &TruncationWindow) -> Result<LambdaReport, FusionError> {
    Ok(LambdaReport {
        first: cache.tensor_dimension(&query.with_mode(BimoduleMode::Bg(lambda1.clone())), window)?,
        second: cache.tensor_dimension(&query.with_mode(BimoduleMode::Bg(lambda2.clone())), window)?,
        plain: cache.tensor_dimension(&query.with_mode(BimoduleMode::Ag), window)?,
    })
}

/// The two routes side by side.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CrossValidation {
    /// Tensor route.
    pub tensor: usize,
    /// Conformal block route.
    pub blocks: usize,
}

/// Computes the fusion rule by both routes and fails on disagreement.
pub fn cross_validate(query: &FusionQuery, window: &TruncationWindow) -> Result<CrossValidation, FusionError> {
    cross_validate_cached(&FusionCache::new(), query, window)
}

/// [`cross_validate`] sharing a cache.
pub fn cross_validate_cached(cache: &FusionCache, query: &FusionQuery, window: &TruncationWindow) -> Result<CrossValidation, FusionError> {
    let tensor = cache.tensor_dimension(query, window)?;
    let datum = BlockDatum::new(query.m1.clone(), query.m2.clone(), query.m3.clone(), *window)?;
    let blocks = solve_blocks(&datum)?.dim();
    if tensor != blocks {
        return Err(FusionError::Mismatch { tensor, blocks });
    }
    Ok(CrossValidation { tensor, blocks })
}

/// The charge `lambda` used for the Heisenberg module `M(1, lambda)` in the table.
pub fn heisenberg_charge() -> Vec<Rational> {
    vec![q(1, 2)]
}

/// The queries of the table: the Heisenberg query and the eight lattice queries
/// for `M1` in `{V_L, V_{L+a/2}}` and all sign pairs.
pub fn table_queries() -> Vec<FusionQuery> {
    let h = VoaInstance::heisenberg_rank_one(Twist::Theta);
    let t = h.module(ModuleKind::Twisted { sign: 1 });
    let mut out = vec![FusionQuery::new(h.module(ModuleKind::Charged(heisenberg_charge())), t.clone(), t)];
    let l = VoaInstance::lattice_a1(Twist::Theta);
    for m1 in [ModuleKind::Adjoint, ModuleKind::HalfCoset] {
        for s2 in [1i8, -1] {
            for s3 in [1i8, -1] {
                out.push(FusionQuery::new(l.module(m1.clone()), l.module(ModuleKind::Twisted { sign: s2 }), l.module(ModuleKind::Twisted { sign: s3 })));
            }
        }
    }
    out
}

/// One line of the fusion table.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TableRow {
    /// Name of `M1`.
    pub m1: String,
    /// Name of `M2`.
    pub m2: String,
    /// Name of `M3`.
    pub m3: String,
    /// Tensor route with stability.
    pub tensor: FusionRule,
    /// Block route.
    pub blocks: usize,
}

impl TableRow {
    /// JSON rendering `{dimension, stable, route: {tensor, blocks}}` with module names.
    pub fn to_json(&self) -> Value {
        json!({
            "m1": self.m1,
            "m2": self.m2,
            "m3": self.m3,
            "dimension": self.tensor.dimension,
            "stable": self.tensor.stable,
            "route": {"tensor": self.tensor.dimension, "blocks": self.blocks},
        })
    }
}

/// Computes one table row by both routes.
pub fn table_row(cache: &FusionCache, query: &FusionQuery, window: &TruncationWindow) -> Result<TableRow, FusionError> {
    let tensor = cache.fusion_rule(query, window)?;
    let datum = BlockDatum::new(query.m1.clone(), query.m2.clone(), query.m3.clone(), *window)?;
    let blocks = solve_blocks(&datum)?.dim();
    Ok(TableRow { m1: query.m1.name(), m2: query.m2.name(), m3: query.m3.name(), tensor, blocks })
}

/// Computes the whole table.
pub fn fusion_table(window: &TruncationWindow) -> Result<Vec<TableRow>, FusionError> {
    let cache = FusionCache::new();
    table_queries().par_iter().map(|q| table_row(&cache, q, window)).collect()
}

fn latex_module(name: &str) -> String {
    match name {
        "M(1)_{Z+1/2}" => r"M(1)_{\mathbb{Z}+1/2}".into(),
        "V_L^T+" => r"V_L^{T_{\chi}}".into(),
        "V_L^T-" => r"V_L^{T_{-\chi}}".into(),
        "V_{L+a/2}" => r"V_{L+\alpha/2}".into(),
        other if other.starts_with("M(1,") => other.replace('a', r"\alpha"),
        other => other.into(),
    }
}

/// The table as a LaTeX `tabular`.
pub fn table_latex(rows: &[TableRow]) -> String {
    let mut s = String::from("\\begin{tabular}{lllccc}\n\\hline\n$M^1$ & $M^2$ & $M^3$ & tensor & blocks & stable \\\\\n\\hline\n");
    for r in rows {
        s.push_str(&format!(
            "${}$ & ${}$ & ${}$ & {} & {} & {} \\\\\n",
            latex_module(&r.m1),
            latex_module(&r.m2),
            latex_module(&r.m3),
            r.tensor.dimension,
            r.blocks,
            if r.tensor.stable { "yes" } else { "no" }
        ));
    }
    s.push_str("\\hline\n\\end{tabular}\n");
    s
}

/// JSON rendering of the algebra basis actions on a bottom level, for diagnostics.
pub fn bottom_action_json(algebra: &ReducedAlgebra, module: &ModuleInstance) -> Result<Value, FusionError> {
    let form = module.voa().form();
    let mats = bottom_matrices(algebra, module)?;
    let basis: Vec<String> = algebra.basis().iter().map(|m: &Monomial| m.render(form)).collect();
    let rendered: Vec<Vec<Vec<String>>> = mats.iter().map(|m| m.iter().map(|r| r.iter().map(fmt_q).collect()).collect()).collect();
    Ok(json!({"module": module.name(), "algebra_basis": basis, "action": rendered}))
}
