//! Mixed moduli of smoothness, anisotropic polynomial approximation, B-spline
//! smoothing and mixed K-functionals on coordinate boxes, with a harness that
//! checks the two-sided Whitney and Johnen-type inequalities numerically.

pub mod differences;
pub mod functions;
pub mod geometry;
pub mod harness;
pub mod polyapprox;
pub mod smoother;
