//! Independent numeric checks of the symbolic rules.

pub mod gamma_rep;
pub mod quad;
pub mod phase;
pub mod claims;
