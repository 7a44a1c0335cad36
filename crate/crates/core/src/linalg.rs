//! Exact sparse linear algebra over the rationals.
//!
//! [`Echelon`] maintains the reduced row echelon form of a growing family of
//! sparse vectors.  Columns are ordered by index and pivots are taken at the
//! smallest index, so callers control which coordinates get eliminated first
//! by choosing the column order.  A shadow echelon form modulo a large prime
//! filters out vectors that are already in the span before any rational
//! arithmetic happens.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use std::collections::BTreeMap;

use crate::rational::Rational;

/// Sparse vector: column index to nonzero coefficient.
pub type SparseVec = BTreeMap<usize, Rational>;

const P: u64 = (1 << 61) - 1;

fn mulmod(a: u64, b: u64) -> u64 {
    ((a as u128 * b as u128) % P as u128) as u64
}

fn powmod(mut a: u64, mut e: u64) -> u64 {
    let mut r = 1;
    while e > 0 {
        if e & 1 == 1 {
            r = mulmod(r, a);
        }
        a = mulmod(a, a);
        e >>= 1;
    }
    r
}

fn to_modp(x: &Rational) -> Option<u64> {
    let p = BigInt::from(P);
    let n = x.numer().mod_floor(&p).to_u64()?;
    let d = x.denom().mod_floor(&p).to_u64()?;
    if d == 0 {
        return None;
    }
    Some(mulmod(n, powmod(d, P - 2)))
}

#[derive(Clone, Debug, Default)]
struct ModpEchelon {
    rows: BTreeMap<usize, Vec<(usize, u64)>>,
}

impl ModpEchelon {
    /// Reduces `v` (sorted, dense-in-map form) and returns the residue.
    fn residue(&self, v: &SparseVec) -> Option<BTreeMap<usize, u64>> {
        let mut w: BTreeMap<usize, u64> = BTreeMap::new();
        for (c, x) in v {
            let m = to_modp(x)?;
            if m != 0 {
                w.insert(*c, m);
            }
        }
        let mut cursor = 0usize;
        while let Some((&c, &x)) = w.range(cursor..).next() {
            if let Some(row) = self.rows.get(&c) {
                for &(rc, rx) in row {
                    let e = w.entry(rc).or_insert(0);
                    *e = (*e + P - mulmod(x, rx)) % P;
                    if *e == 0 {
                        w.remove(&rc);
                    }
                }
            }
            cursor = c + 1;
        }
        Some(w)
    }

    fn push(&mut self, w: BTreeMap<usize, u64>) {
        let (&c, &x) = w.iter().next().expect("nonzero residue");
        let inv = powmod(x, P - 2);
        let row: Vec<(usize, u64)> = w.iter().map(|(k, v)| (*k, mulmod(*v, inv))).collect();
        self.rows.insert(c, row);
    }
}

/// Reduced row echelon form of the span of inserted vectors.
#[derive(Clone, Debug)]
pub struct Echelon {
    ncols: usize,
    rows: BTreeMap<usize, SparseVec>,
    shadow: ModpEchelon,
}

impl Echelon {
    /// Empty span in `ncols` columns.
    pub fn new(ncols: usize) -> Self {
        Echelon { ncols, rows: BTreeMap::new(), shadow: ModpEchelon::default() }
    }

    /// Number of columns.
    pub fn ncols(&self) -> usize {
        self.ncols
    }

    /// Dimension of the span.
    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Pivot columns in increasing order.
    pub fn pivots(&self) -> impl Iterator<Item = usize> + '_ {
        self.rows.keys().copied()
    }

    /// True when `c` is a pivot column.
    pub fn is_pivot(&self, c: usize) -> bool {
        self.rows.contains_key(&c)
    }

    /// Columns that are not pivots.
    pub fn free_columns(&self) -> Vec<usize> {
        (0..self.ncols).filter(|c| !self.rows.contains_key(c)).collect()
    }

    /// The reduced row with pivot `c`.
    pub fn row(&self, c: usize) -> Option<&SparseVec> {
        self.rows.get(&c)
    }

    /// Reduces `v` modulo the span; the result is supported on free columns.
    pub fn reduce(&self, v: &SparseVec) -> SparseVec {
        let mut w = v.clone();
        let hits: Vec<(usize, Rational)> = w.iter().filter(|(c, _)| self.rows.contains_key(c)).map(|(c, x)| (*c, x.clone())).collect();
        for (c, x) in hits {
            for (rc, rx) in &self.rows[&c] {
                add_to(&mut w, *rc, -(&x * rx));
            }
        }
        w
    }

    /// Adds `v` to the span; returns true when the rank grew.
    pub fn insert(&mut self, v: SparseVec) -> bool {
        if v.is_empty() {
            return false;
        }
        let shadow = self.shadow.residue(&v);
        if let Some(w) = &shadow {
            if w.is_empty() {
                return false;
            }
        }
        let mut w = self.reduce(&v);
        w.retain(|_, x| !x.is_zero());
        let Some((&c, x)) = w.iter().next() else {
            return false;
        };
        let inv = x.recip();
        for x in w.values_mut() {
            *x *= &inv;
        }
        for row in self.rows.values_mut() {
            if let Some(f) = row.get(&c).cloned() {
                for (k, y) in &w {
                    add_to(row, *k, -(&f * y));
                }
            }
        }
        match shadow {
            Some(s) => self.shadow.push(s),
            None => self.rebuild_shadow_row(&w),
        }
        self.rows.insert(c, w);
        true
    }

    fn rebuild_shadow_row(&mut self, w: &SparseVec) {
        if let Some(s) = self.shadow.residue(w) {
            if !s.is_empty() {
                self.shadow.push(s);
            }
        }
    }

    /// Basis of the linear functionals vanishing on the span.
    ///
    /// For each free column `f` the functional is `1` on `f`, `-row_p[f]` on
    /// each pivot `p`, and zero elsewhere.
    pub fn annihilator(&self) -> Vec<SparseVec> {
        let mut out = Vec::new();
        for f in self.free_columns() {
            let mut phi = SparseVec::new();
            phi.insert(f, Rational::one());
            for (p, row) in &self.rows {
                if let Some(x) = row.get(&f) {
                    phi.insert(*p, -x.clone());
                }
            }
            out.push(phi);
        }
        out
    }
}

/// `v[c] += x`, dropping zeros.
pub fn add_to(v: &mut SparseVec, c: usize, x: Rational) {
    if x.is_zero() {
        return;
    }
    use std::collections::btree_map::Entry;
    match v.entry(c) {
        Entry::Vacant(e) => {
            e.insert(x);
        }
        Entry::Occupied(mut e) => {
            *e.get_mut() += x;
            if e.get().is_zero() {
                e.remove();
            }
        }
    }
}

/// Rank of a family of sparse vectors.
pub fn rank(vs: impl IntoIterator<Item = SparseVec>, ncols: usize) -> usize {
    let mut e = Echelon::new(ncols);
    for v in vs {
        e.insert(v);
    }
    e.rank()
}

/// Pairing `sum_c phi[c] v[c]`.
pub fn pair(phi: &SparseVec, v: &SparseVec) -> Rational {
    let (small, big) = if phi.len() <= v.len() { (phi, v) } else { (v, phi) };
    small.iter().filter_map(|(c, x)| big.get(c).map(|y| x * y)).fold(Rational::zero(), |a, b| a + b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{q, qi};

    fn sv(xs: &[(usize, Rational)]) -> SparseVec {
        xs.iter().cloned().collect()
    }

    #[test]
    fn rank_and_reduction() {
        let mut e = Echelon::new(3);
        assert!(e.insert(sv(&[(0, qi(1)), (1, qi(2))])));
        assert!(e.insert(sv(&[(1, qi(1)), (2, q(1, 2))])));
        assert!(!e.insert(sv(&[(0, qi(2)), (1, qi(5)), (2, q(1, 2))])));
        assert_eq!(e.rank(), 2);
        assert_eq!(e.free_columns(), vec![2]);
        let r = e.reduce(&sv(&[(0, qi(1))]));
        assert_eq!(r, sv(&[(2, qi(1))]));
        for phi in e.annihilator() {
            for row in e.rows.values() {
                assert!(pair(&phi, row).is_zero());
            }
        }
    }
}
