//! Simulation and analysis toolkit for truncated Lévy flights.
//!
//! A truncated Lévy flight is a discrete random walk whose i.i.d. increments
//! follow a symmetric α-stable law multiplied by a decaying "deformation"
//! (truncation) function `g`. The truncation makes every moment finite while
//! leaving the central, heavy-tailed part of the law intact, so the walk is
//! Brownian at large scales but retains Lévy characteristics at small ones.
//!
//! The crate provides:
//!
//! - [`deformation`]: built-in (hard-cut and exponential) and tabulated
//!   truncation shapes with asymmetry, plus their even/odd decomposition;
//! - [`cumulants`]: analytic increment cumulants of the truncated law to
//!   first order in the scale ratio ε = (γ/l)^α, and a brute-force
//!   quadrature oracle with no small-ε approximation;
//! - [`distribution`]: pointwise evaluation of the symmetric stable density,
//!   the truncated density and its normalization, tail approximations and
//!   return probabilities;
//! - [`sampler`]: exact rejection sampling of truncated variates and
//!   reproducible, seeded generation of walk ensembles;
//! - [`walk_theory`]: closed-form cumulant functions, correlation
//!   coefficients, correlation times and regime classification for i.i.d.
//!   random walks;
//! - [`estimator`]: k-statistics, joint cumulant and correlation-coefficient
//!   estimators with bootstrap standard errors;
//! - [`verification`]: the desk-scale reproduction checks wired into the
//!   `reproduce-paper` CLI command and the acceptance test suite.
//!
//! Everything is deterministic given a seed: walk ensembles derive one RNG
//! stream per realization and bootstrap resamples derive one stream per
//! replicate, so results are reproducible run to run on a given platform.

pub mod cumulants;
pub mod deformation;
pub mod distribution;
pub mod error;
pub mod estimator;
pub mod numeric;
pub mod sampler;
pub mod verification;
pub mod walk_theory;

pub use cumulants::{CumulantSet, StableParams};
pub use deformation::{DeformationKind, DeformationSpec};
pub use error::{Error, Result};
pub use sampler::WalkEnsemble;
