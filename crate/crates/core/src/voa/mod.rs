//! Heisenberg and rank-one lattice vertex operator algebras with their
//! untwisted and `theta`-twisted modules.
//!
//! Every space is a Fock space spanned by [`Monomial`]s, so one engine covers
//! the algebra `M(1)` of any rank, the charged modules `M(1, lambda)`, the
//! lattice algebra `V_L` for `L = Z alpha` with `(alpha|alpha) = 2` and the
//! trivial cocycle, its coset module `V_{L + alpha/2}`, the twisted Fock space
//! `M(1)_{Z+1/2}`, and the twisted lattice modules `V_L^{T_chi}` on which
//! `e_alpha` acts on the one-dimensional `T_chi` by a sign.
//!
//! ```
//! use voatwist::voa::{VoaInstance, Twist};
//! use voatwist::rational::qi;
//! let v = VoaInstance::heisenberg_rank_one(Twist::Theta);
//! let a = v.generator(0);
//! let p = v.nth_product(&a, 1, &a);
//! assert_eq!(p, v.vacuum().scale(&qi(1)));
//! ```

mod fock;
mod form;
mod instance;
mod state;

pub use form::Form;
pub use instance::{ModuleInstance, ModuleKind, Twist, VoaInstance, VoaKind};
pub use state::{GradedVector, Monomial};

use thiserror::Error;

use crate::exponent::Exponent;

/// Errors raised by the vertex algebra layer.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum VoaError {
    /// The mode index is not in `r/T + Z` for any eigencomponent of the source.
    #[error("mode {mode} is not allowed for a source in sectors {sectors:?}")]
    SectorMismatch {
        /// The requested mode.
        mode: Exponent,
        /// Sectors of the nonzero eigencomponents of the source.
        sectors: Vec<u32>,
    },
    /// The vector is not an eigenvector of `L(0)`.
    #[error("vector is not homogeneous")]
    NotHomogeneous,
    /// The bilinear form is unusable.
    #[error("invalid bilinear form: {0}")]
    InvalidForm(String),
    /// A monomial does not belong to the space.
    #[error("monomial does not belong to this space: {0}")]
    WrongSpace(String),
    /// Text could not be parsed as a state.
    #[error("cannot parse state: {0:?}")]
    Parse(String),
}
