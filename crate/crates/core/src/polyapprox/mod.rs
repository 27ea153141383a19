//! Tensor polynomials, best approximation from `P_r` and mixed Taylor
//! polynomials.

mod fit;
pub mod simplex;
mod taylor;
mod tensor_poly;

use thiserror::Error;

use crate::functions::FunctionError;
use crate::geometry::{Exponent, MultiIndex};

pub use fit::{
    best_approx, default_grid, equioscillation_count, inner_product, BestApprox, FitConfig,
};
pub use simplex::{LinearProgram, LpSolution, SimplexError};
pub use taylor::{taylor_poly, taylor_remainder_bound};
pub use tensor_poly::{Basis, TensorPolynomial};

#[derive(Error, Debug, Clone, PartialEq)]
pub enum ApproxError {
    #[error("best approximation is only available for p in {{1, 2, inf}}, got {0}")]
    UnsupportedExponent(Exponent),

    #[error("order must be at least one on every axis, got {0}")]
    OrderNotPositive(MultiIndex),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("expected {expected} coefficients, found {found}")]
    CoefficientCount { expected: usize, found: usize },

    #[error("axis {axis}: {points} fitting points, at least {needed} required")]
    GridTooCoarse {
        axis: usize,
        points: usize,
        needed: usize,
    },

    #[error("function is not finite at {0:?}")]
    NonFiniteSample(Vec<f64>),

    #[error("Taylor anchor {0:?} lies outside the box")]
    AnchorOutsideBox(Vec<f64>),

    #[error("linear program failed: {source}")]
    Solver {
        #[source]
        source: SimplexError,
        /// Legendre coefficients of the best iterate, when one exists.
        incumbent: Option<Vec<f64>>,
    },

    #[error(transparent)]
    Function(#[from] FunctionError),
}
