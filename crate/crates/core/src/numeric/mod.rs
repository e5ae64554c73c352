//! Numerical building blocks: special functions and adaptive quadrature.

pub mod quad;
pub mod special;

/// Default relative tolerance for all quadrature in the crate.
pub const DEFAULT_REL_TOL: f64 = 1e-9;
