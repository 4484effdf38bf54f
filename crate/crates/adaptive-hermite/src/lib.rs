//! Adaptive Hermite spectral solver for the Boltzmann equation.
//!
//! The velocity distribution is expanded in scaled, shifted Hermite
//! functions. The expansion order and the scaling factor are adjusted during
//! the run from a frequency indicator, the quadratic collision operator is
//! discretised by a precomputed tensor on a low-order block, and the higher
//! modes are relaxed with a BGK-type term.

pub mod adaptivity;
pub mod collision;
pub mod error;
pub mod hermite;
pub mod moments;
pub mod par;
pub mod projection;
pub mod solver;

pub use error::{Error, Result};
