//! The Cartan subalgebra `h` with its bilinear form.

use num_traits::{One, Zero};

use crate::rational::{qi, Rational};
use crate::voa::VoaError;

/// A finite-dimensional space `h` with named basis vectors and a
/// nondegenerate symmetric bilinear form `(.|.)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Form {
    names: Vec<String>,
    gram: Vec<Vec<Rational>>,
    dual: Vec<Vec<Rational>>,
}

impl Form {
    /// Builds a form from basis names and its Gram matrix.
    pub fn new(names: Vec<String>, gram: Vec<Vec<Rational>>) -> Result<Self, VoaError> {
        let d = names.len();
        if d == 0 || gram.len() != d || gram.iter().any(|r| r.len() != d) {
            return Err(VoaError::InvalidForm("Gram matrix must be square and match the names".into()));
        }
        if !gram.iter().enumerate().all(|(i, row)| row.iter().enumerate().all(|(j, x)| *x == gram[j][i])) {
            return Err(VoaError::InvalidForm("Gram matrix must be symmetric".into()));
        }
        let dual = invert(&gram).ok_or_else(|| VoaError::InvalidForm("Gram matrix is degenerate".into()))?;
        Ok(Form { names, gram, dual })
    }

    /// Rank one with `(a|a) = norm`.
    pub fn rank_one(name: &str, norm: Rational) -> Result<Self, VoaError> {
        Form::new(vec![name.to_string()], vec![vec![norm]])
    }

    /// Rank `d` with the identity Gram matrix and names `h1, ..., hd`.
    pub fn standard(d: usize) -> Result<Self, VoaError> {
        let names = (1..=d).map(|i| format!("h{i}")).collect();
        let gram = (0..d).map(|i| (0..d).map(|j| if i == j { Rational::one() } else { Rational::zero() }).collect()).collect();
        Form::new(names, gram)
    }

    /// Dimension of `h`.
    pub fn rank(&self) -> usize {
        self.names.len()
    }

    /// Basis names.
    pub fn names(&self) -> &[String] {
        &self.names
    }

    /// Index of a basis name.
    pub fn index(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    /// `(h_i|h_j)`.
    pub fn gram(&self, i: usize, j: usize) -> &Rational {
        &self.gram[i][j]
    }

    /// Entry `(i, j)` of the inverse Gram matrix; `h^i = sum_j dual(i, j) h_j`.
    pub fn dual(&self, i: usize, j: usize) -> &Rational {
        &self.dual[i][j]
    }

    /// `(h_i|beta)` for `beta` given in coordinates.
    pub fn pair_basis(&self, i: usize, beta: &[Rational]) -> Rational {
        beta.iter().enumerate().map(|(j, b)| &self.gram[i][j] * b).fold(Rational::zero(), |a, b| a + b)
    }

    /// `(beta|gamma)` for vectors given in coordinates.
    pub fn pair(&self, beta: &[Rational], gamma: &[Rational]) -> Rational {
        beta.iter().enumerate().map(|(i, b)| b * self.pair_basis(i, gamma)).fold(Rational::zero(), |a, b| a + b)
    }
}

fn invert(m: &[Vec<Rational>]) -> Option<Vec<Vec<Rational>>> {
    let d = m.len();
    let mut a: Vec<Vec<Rational>> = m
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut row = r.clone();
            row.extend((0..d).map(|j| if i == j { qi(1) } else { qi(0) }));
            row
        })
        .collect();
    for c in 0..d {
        let p = (c..d).find(|&r| !a[r][c].is_zero())?;
        a.swap(c, p);
        let inv = a[c][c].recip();
        for x in a[c].iter_mut() {
            *x *= &inv;
        }
        for r in 0..d {
            if r != c && !a[r][c].is_zero() {
                let f = a[r][c].clone();
                let pivot = a[c].clone();
                for (x, y) in a[r].iter_mut().zip(pivot.iter()) {
                    *x -= &f * y;
                }
            }
        }
    }
    Some(a.into_iter().map(|r| r[d..].to_vec()).collect())
}
