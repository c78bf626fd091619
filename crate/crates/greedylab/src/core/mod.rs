//! Scalar and vector primitives, weights and the geometric constants.

mod geom;
mod scalar;
mod vector;
mod weight;

pub use geom::{eta_p, geom_constants, GeomConstants};
pub use scalar::Scalar;
pub use vector::{nonincreasing_rearrangement, IndexSet, SignPattern, SpVec};
pub use weight::{WeightKind, WeightSpec};

/// Default tolerance for tolerance-bearing comparisons.
pub const DEFAULT_TOL: f64 = 1e-9;
