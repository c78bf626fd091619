//! Basis models, the greedy machinery and best `m`-term error functionals.

pub mod combin;
mod greedy;
mod matrix;
mod sigma;

pub use greedy::{
    enumerate_greedy_sets, greedy_order, greedy_projection, greedy_set, greedy_trace, is_greedy_set,
    is_strictly_greedy_set, magnitude_levels, residual, strictly_greedy_sets, truncation_t, truncation_u,
    GreedyTrace, BOUNDARY_CAP,
};
pub use matrix::MatrixBasis;
pub use sigma::{sigma, sigma_grid, sigma_tilde, SigmaEstimate, SigmaMode, EXACT_CAP};

use crate::core::{Scalar, SpVec};
use crate::error::{invalid, Result};
use crate::spaces::SpaceSpec;

/// A basis together with the quasi-norm of its span.
///
/// Vectors are always handled through their coefficient sequence
/// `f = Σ a_n x_n`; the lattice model identifies `x_n` with the unit vector
/// `e_n` of a [`SpaceSpec`], the matrix model synthesizes `Σ a_n x_n` in a
/// Euclidean ambient space.
#[derive(Clone, Debug)]
pub enum BasisModel<T: Scalar> {
    Lattice(SpaceSpec),
    Matrix(MatrixBasis<T>),
}

impl<T: Scalar> BasisModel<T> {
    pub fn lattice(space: SpaceSpec) -> Self {
        Self::Lattice(space)
    }

    pub fn parse(space: &str) -> Result<Self> {
        Ok(Self::Lattice(SpaceSpec::parse(space)?))
    }

    pub fn matrix(columns: Vec<Vec<T>>) -> Result<Self> {
        Ok(Self::Matrix(MatrixBasis::new(columns)?))
    }

    /// `‖Σ a_n x_n‖`.
    pub fn norm(&self, f: &SpVec<T>) -> T {
        match self {
            Self::Lattice(s) => s.nrm(f),
            Self::Matrix(m) => m.norm(f),
        }
    }

    pub fn space(&self) -> Option<&SpaceSpec> {
        match self {
            Self::Lattice(s) => Some(s),
            Self::Matrix(_) => None,
        }
    }

    /// Largest admissible contiguous dimension, if bounded.
    pub fn max_dim(&self) -> Option<usize> {
        match self {
            Self::Lattice(s) => s.max_dim(),
            Self::Matrix(m) => Some(m.dim()),
        }
    }

    /// Fails when coordinates `1..=d` are not all admissible.
    pub fn check_dim(&self, d: usize) -> Result<()> {
        match self.max_dim() {
            Some(max) if d > max => Err(invalid(format!("dimension {d} exceeds the model's limit {max}"))),
            _ => Ok(()),
        }
    }

    /// True when the model is the unit-vector basis of a lattice-unconditional space.
    pub fn is_lattice(&self) -> bool {
        matches!(self, Self::Lattice(s) if s.is_lattice())
    }

    pub fn is_symmetric(&self) -> bool {
        matches!(self, Self::Lattice(s) if s.is_symmetric())
    }

    /// Certified `p`-norm exponent of the span.
    pub fn p_exponent(&self) -> f64 {
        match self {
            Self::Lattice(s) => s.p_exponent(),
            Self::Matrix(_) => 1.0,
        }
    }

    pub fn label(&self) -> String {
        match self {
            Self::Lattice(s) => s.to_string(),
            Self::Matrix(m) => format!("matrix(d={})", m.dim()),
        }
    }
}
