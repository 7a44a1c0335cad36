//! Exact computer algebra for twisted vertex operator algebras.
//!
//! The crate implements the formal calculus behind twisted conformal blocks on
//! the projective line, together with the algebraic side of the twisted
//! fusion rules theorem:
//!
//! * [`rational`], [`exponent`], [`poly`], [`series`], [`mpf`]: exact scalars
//!   and Puiseux series with windows of exactness, plus rational functions
//!   with diagonal poles.
//! * [`kernels`]: the kernel functions `F_{n,i}` and the residue sum formula.
//! * [`voa`]: Heisenberg and rank-one lattice vertex algebras with their
//!   untwisted and `theta`-twisted modules.
//! * [`zhu`]: twisted Zhu algebras with their bimodules, plus the filtration check.
//! * [`correlation`]: restricted conformal blocks and correlation functions.
//! * [`fusion`]: fusion rules by tensor products over the Zhu algebra.
//! * [`report`]: case counts returned by the verification routines.
//!
//! Everything is exact over the rationals.

pub mod correlation;
pub mod error;
pub mod exponent;
pub mod fusion;
pub mod kernels;
pub mod linalg;
pub mod mpf;
pub mod poly;
pub mod rational;
pub mod report;
pub mod series;
pub mod voa;
pub mod zhu;

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/formal_calculus.md")]
    mod formal_calculus {}
    #[doc = include_str!("../../../book/src/vertex_algebras.md")]
    mod vertex_algebras {}
    #[doc = include_str!("../../../book/src/zhu.md")]
    mod zhu {}
    #[doc = include_str!("../../../book/src/conformal_blocks.md")]
    mod conformal_blocks {}
    #[doc = include_str!("../../../book/src/fusion.md")]
    mod fusion {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
