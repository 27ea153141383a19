//! Boxes, index bookkeeping and the tensor quadrature behind every norm.

mod domain;
mod index;
mod quadrature;

use thiserror::Error;

pub use domain::{difference_domain, shifted_domain, Parallelepiped};
pub use index::{binomial, whitney_lower_constant, BoxIter, MultiIndex, StepVector, SubsetMask};
pub use quadrature::{
    chebyshev_lobatto, gauss_legendre, integrate, lp_norm, lp_norm_or_zero, power_integral,
    Exponent, GaussLegendre, Grading, QuadratureRule, QuadratureSpec, TensorGrid,
};

#[derive(Error, Debug, Clone, PartialEq)]
pub enum GeometryError {
    #[error("a box needs at least one axis")]
    ZeroDimension,

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("axis {axis}: interval [{lower}, {upper}] is not a proper finite interval")]
    InvalidInterval { axis: usize, lower: f64, upper: f64 },

    #[error("exponent p = {0} is outside [1, inf]")]
    InvalidExponent(f64),

    #[error("cannot parse exponent {0:?}; expected a number or \"inf\"")]
    UnparsableExponent(String),

    #[error("invalid quadrature: {0}")]
    InvalidQuadrature(String),
}
