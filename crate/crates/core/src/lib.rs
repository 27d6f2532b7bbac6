//! Zeta-regularized functional determinants from Weyl symbol calculus.
//!
//! The crate computes `ln det` of `-∂² + V` and `γ·∂ + φ` as derivative
//! expansions: the resolvent symbol is expanded with the Moyal product, the
//! spectral parameter is integrated out through the semigroup representation,
//! momenta are integrated in `d` dimensions and the zeta function is
//! differentiated at `s = 0`. Every analytic rule has a numeric oracle in
//! [`oracle`].

pub mod clifford;
pub mod error;
pub mod expr;
pub mod mellin;
pub mod momint;
pub mod oracle;
pub mod phasespace;
pub mod resolvent;
pub mod special;
pub mod yukawa;
pub mod zeta;

pub use error::{Error, Result};
