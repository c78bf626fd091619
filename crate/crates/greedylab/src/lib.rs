//! Numerical laboratory for the thresholding greedy algorithm over
//! quasi-Banach sequence spaces.
//!
//! The numeric kernels in [`core`], [`spaces`] and [`basis`] are generic over
//! the floating-point scalar (`f32` or `f64`); the search-heavy layers
//! ([`constants`], [`renorm`], [`gallery`], [`verify`]) run in `f64`.
//! Concrete `f64` aliases live at the crate root.

pub mod basis;
pub mod constants;
pub mod core;
pub mod error;
pub mod gallery;
pub mod renorm;
pub mod spaces;
pub mod verify;

pub use crate::core::{Scalar, SignPattern, SpVec, WeightKind, WeightSpec};
pub use crate::error::{Error, Result};
pub use crate::spaces::{SpaceKind, SpaceSpec};

/// Sparse vector with `f64` coefficients.
pub type SpVec64 = crate::core::SpVec<f64>;
/// Sparse vector with `f32` coefficients.
pub type SpVec32 = crate::core::SpVec<f32>;
/// Geometric constants in `f64`.
pub type GeomConstants64 = crate::core::GeomConstants<f64>;
/// Basis model over `f64`.
pub type BasisModel64 = crate::basis::BasisModel<f64>;
/// Basis model over `f32`.
pub type BasisModel32 = crate::basis::BasisModel<f32>;
