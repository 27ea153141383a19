//! Closed-form test functions with analytic mixed partial derivatives.
//!
//! Every corpus entry is a tensor-product expression (or a sum, scaling or
//! affine pullback of one), so a mixed derivative of order `k` factorises
//! into univariate derivatives and is available in closed form.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use thiserror::Error;

use crate::geometry::{lp_norm, Exponent, MultiIndex, Parallelepiped, QuadratureSpec, SubsetMask};

/// Anything that can be evaluated pointwise on `R^d`.
pub trait Evaluate: Send + Sync {
    fn dim(&self) -> usize;
    fn eval(&self, x: &[f64]) -> f64;
}

impl<T: Evaluate + ?Sized> Evaluate for &T {
    fn dim(&self) -> usize {
        (**self).dim()
    }

    fn eval(&self, x: &[f64]) -> f64 {
        (**self).eval(x)
    }
}

impl<T: Evaluate + ?Sized> Evaluate for Arc<T> {
    fn dim(&self) -> usize {
        (**self).dim()
    }

    fn eval(&self, x: &[f64]) -> f64 {
        (**self).eval(x)
    }
}

/// Adapts a closure to [`Evaluate`].
pub struct FnEval<F> {
    dim: usize,
    f: F,
}

impl<F: Fn(&[f64]) -> f64 + Send + Sync> FnEval<F> {
    pub fn new(dim: usize, f: F) -> Self {
        FnEval { dim, f }
    }
}

impl<F: Fn(&[f64]) -> f64 + Send + Sync> Evaluate for FnEval<F> {
    fn dim(&self) -> usize {
        self.dim
    }

    fn eval(&self, x: &[f64]) -> f64 {
        (self.f)(x)
    }
}

#[derive(Error, Debug, Clone, PartialEq)]
pub enum FunctionError {
    #[error("function {id} is only declared in L_p; it exposes no derivatives")]
    NotSobolev { id: String },

    #[error("function {id} provides derivatives up to {available}, but order {requested} was requested")]
    OrderTooHigh {
        id: String,
        requested: MultiIndex,
        available: MultiIndex,
    },

    #[error("no corpus entry named {0:?}")]
    UnknownId(String),

    #[error("dimension mismatch for {id}: function has d = {expected}, argument has {found}")]
    DimensionMismatch {
        id: String,
        expected: usize,
        found: usize,
    },
}

/// Declared membership of a test function.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SmoothnessClass {
    /// Only `L_p` membership; no derivatives are exposed.
    LpOnly,
    /// Analytic mixed derivatives of every order `k <= r_max`.
    Sobolev { r_max: MultiIndex },
}

impl SmoothnessClass {
    fn meet(&self, other: &SmoothnessClass) -> SmoothnessClass {
        match (self, other) {
            (SmoothnessClass::Sobolev { r_max: a }, SmoothnessClass::Sobolev { r_max: b }) => {
                SmoothnessClass::Sobolev {
                    r_max: MultiIndex::new(
                        a.entries()
                            .iter()
                            .zip(b.entries())
                            .map(|(x, y)| *x.min(y))
                            .collect(),
                    ),
                }
            }
            _ => SmoothnessClass::LpOnly,
        }
    }
}

impl fmt::Display for SmoothnessClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SmoothnessClass::LpOnly => write!(f, "Lp_only"),
            SmoothnessClass::Sobolev { r_max } => write!(f, "Sobolev({r_max})"),
        }
    }
}

#[derive(Debug)]
enum Kind {
    /// `sum_alpha c_alpha x^alpha` with `alpha < extents`, last axis fastest.
    Polynomial {
        extents: MultiIndex,
        coeffs: Vec<f64>,
    },
    /// `exp(a . x)`.
    Exp { rate: Vec<f64> },
    /// `prod_i sin(omega_i x_i + phi_i)`.
    SinProduct { freq: Vec<f64>, phase: Vec<f64> },
    /// `prod_i 1 / (1 + s^2 x_i^2)`.
    Runge { scale: f64 },
    /// `prod_i |x_i - c_i|^alpha`.
    AbsPow { center: Vec<f64>, alpha: f64 },
    Scaled { factor: f64, inner: FunctionSpec },
    Sum { left: FunctionSpec, right: FunctionSpec },
    /// `y -> inner(offset + scale * y)`.
    Affine {
        inner: FunctionSpec,
        offset: Vec<f64>,
        scale: Vec<f64>,
    },
}

/// A named test function with its declared smoothness class.
#[derive(Debug, Clone)]
pub struct FunctionSpec {
    id: String,
    dim: usize,
    class: SmoothnessClass,
    kind: Arc<Kind>,
}

/// Orders up to which analytic entries expose derivatives.
const ANALYTIC_R_MAX: usize = 8;
/// Polynomials have derivatives of every order; this is the declared cap.
const POLYNOMIAL_R_MAX: usize = 32;

impl FunctionSpec {
    fn build(id: impl Into<String>, dim: usize, class: SmoothnessClass, kind: Kind) -> Self {
        FunctionSpec {
            id: id.into(),
            dim,
            class,
            kind: Arc::new(kind),
        }
    }

    /// Dense tensor polynomial in plain monomials; `coeffs` is indexed by
    /// `alpha < extents` with the last axis fastest.
    pub fn tensor_polynomial(id: impl Into<String>, extents: MultiIndex, coeffs: Vec<f64>) -> Self {
        assert_eq!(
            extents.box_volume(),
            coeffs.len(),
            "coefficient count must match the degree box"
        );
        let dim = extents.dim();
        Self::build(
            id,
            dim,
            SmoothnessClass::Sobolev {
                r_max: MultiIndex::splat(dim, POLYNOMIAL_R_MAX),
            },
            Kind::Polynomial { extents, coeffs },
        )
    }

    /// The single monomial `x^powers`.
    pub fn monomial(powers: &[usize]) -> Self {
        let extents = MultiIndex::new(powers.iter().map(|k| k + 1).collect());
        let mut coeffs = vec![0.0; extents.box_volume()];
        *coeffs.last_mut().expect("non-empty") = 1.0;
        let name: Vec<String> = powers.iter().map(|k| k.to_string()).collect();
        Self::tensor_polynomial(format!("mono_{}", name.join("_")), extents, coeffs)
    }

    pub fn zero(dim: usize) -> Self {
        Self::tensor_polynomial("zero", MultiIndex::splat(dim, 1), vec![0.0])
    }

    pub fn constant(dim: usize, value: f64) -> Self {
        Self::tensor_polynomial(format!("const_{value}"), MultiIndex::splat(dim, 1), vec![value])
    }

    /// Polynomial of coordinate degree `degree` on every axis with
    /// coefficients `(-1)^{|alpha|} / (1 + |alpha|)`.
    pub fn corpus_polynomial(dim: usize, degree: usize) -> Self {
        let extents = MultiIndex::splat(dim, degree + 1);
        let coeffs = extents
            .iter_below()
            .map(|a| {
                let n = a.order();
                let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
                sign / (1.0 + n as f64)
            })
            .collect();
        Self::tensor_polynomial(format!("poly_d{dim}_deg{degree}"), extents, coeffs)
    }

    pub fn exp(id: impl Into<String>, rate: Vec<f64>) -> Self {
        let dim = rate.len();
        Self::build(
            id,
            dim,
            SmoothnessClass::Sobolev {
                r_max: MultiIndex::splat(dim, ANALYTIC_R_MAX),
            },
            Kind::Exp { rate },
        )
    }

    pub fn sin_product(id: impl Into<String>, freq: Vec<f64>, phase: Vec<f64>) -> Self {
        assert_eq!(freq.len(), phase.len());
        let dim = freq.len();
        Self::build(
            id,
            dim,
            SmoothnessClass::Sobolev {
                r_max: MultiIndex::splat(dim, ANALYTIC_R_MAX),
            },
            Kind::SinProduct { freq, phase },
        )
    }

    /// `prod_i 1 / (1 + 25 x_i^2)`.
    pub fn runge(id: impl Into<String>, dim: usize) -> Self {
        Self::build(
            id,
            dim,
            SmoothnessClass::Sobolev {
                r_max: MultiIndex::splat(dim, ANALYTIC_R_MAX),
            },
            Kind::Runge { scale: 5.0 },
        )
    }

    pub fn abs_pow(id: impl Into<String>, center: Vec<f64>, alpha: f64) -> Self {
        let dim = center.len();
        Self::build(
            id,
            dim,
            SmoothnessClass::LpOnly,
            Kind::AbsPow { center, alpha },
        )
    }

    /// `c * f`.
    pub fn scaled(&self, factor: f64) -> Self {
        Self::build(
            format!("{factor}*{}", self.id),
            self.dim,
            self.class.clone(),
            Kind::Scaled {
                factor,
                inner: self.clone(),
            },
        )
    }

    /// `f + g`.
    pub fn plus(&self, other: &FunctionSpec) -> Self {
        assert_eq!(self.dim, other.dim, "cannot add functions of different dimension");
        Self::build(
            format!("{}+{}", self.id, other.id),
            self.dim,
            self.class.meet(&other.class),
            Kind::Sum {
                left: self.clone(),
                right: other.clone(),
            },
        )
    }

    /// `y -> f(offset + scale * y)`, e.g. the pullback of `f` from a box to
    /// the unit cube.
    pub fn affine_pullback(&self, offset: Vec<f64>, scale: Vec<f64>) -> Self {
        assert_eq!(offset.len(), self.dim);
        assert_eq!(scale.len(), self.dim);
        Self::build(
            format!("{}@affine", self.id),
            self.dim,
            self.class.clone(),
            Kind::Affine {
                inner: self.clone(),
                offset,
                scale,
            },
        )
    }

    /// Pullback of `f` from `q` to the unit cube.
    pub fn pulled_back_to_unit(&self, q: &Parallelepiped) -> Self {
        self.affine_pullback(q.lower().to_vec(), q.size().entries().to_vec())
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn class(&self) -> &SmoothnessClass {
        &self.class
    }

    pub fn is_sobolev(&self) -> bool {
        matches!(self.class, SmoothnessClass::Sobolev { .. })
    }

    /// Coordinate degree bound if this is a bare tensor polynomial: `f` lies
    /// in `P_r` exactly when the returned extents are `<= r`.
    pub fn polynomial_extents(&self) -> Option<MultiIndex> {
        match &*self.kind {
            Kind::Polynomial { extents, coeffs } => {
                // trailing zero coefficients do not raise the degree
                let mut effective = vec![1usize; extents.dim()];
                for (alpha, c) in extents.iter_below().zip(coeffs) {
                    if *c != 0.0 {
                        for (e, a) in effective.iter_mut().zip(alpha.entries()) {
                            *e = (*e).max(a + 1);
                        }
                    }
                }
                Some(MultiIndex::new(effective))
            }
            _ => None,
        }
    }

    /// Per-axis coordinates where `f` fails to be smooth, sorted and deduplicated.
    pub fn singular_points(&self) -> Vec<Vec<f64>> {
        let mut out = match &*self.kind {
            Kind::AbsPow { center, .. } => center.iter().map(|c| vec![*c]).collect(),
            Kind::Scaled { inner, .. } => inner.singular_points(),
            Kind::Sum { left, right } => left
                .singular_points()
                .into_iter()
                .zip(right.singular_points())
                .map(|(mut a, b)| {
                    a.extend(b);
                    a
                })
                .collect(),
            Kind::Affine {
                inner,
                offset,
                scale,
            } => inner
                .singular_points()
                .into_iter()
                .enumerate()
                .map(|(i, pts)| {
                    if scale[i] == 0.0 {
                        Vec::new()
                    } else {
                        pts.iter().map(|y| (y - offset[i]) / scale[i]).collect()
                    }
                })
                .collect(),
            _ => vec![Vec::new(); self.dim],
        };
        for pts in &mut out {
            pts.sort_by(f64::total_cmp);
            pts.dedup();
        }
        out
    }

    /// True when `f` is a tensor polynomial in `P_r`.
    pub fn is_in_polynomial_space(&self, r: &MultiIndex) -> bool {
        self.polynomial_extents().is_some_and(|e| e.le(r))
    }

    /// Checks that `f^{(k)}` is exposed.
    pub fn check_derivative(&self, k: &MultiIndex) -> Result<(), FunctionError> {
        if k.dim() != self.dim {
            return Err(FunctionError::DimensionMismatch {
                id: self.id.clone(),
                expected: self.dim,
                found: k.dim(),
            });
        }
        match &self.class {
            SmoothnessClass::LpOnly if !k.is_zero() => Err(FunctionError::NotSobolev {
                id: self.id.clone(),
            }),
            SmoothnessClass::Sobolev { r_max } if !k.le(r_max) => {
                Err(FunctionError::OrderTooHigh {
                    id: self.id.clone(),
                    requested: k.clone(),
                    available: r_max.clone(),
                })
            }
            _ => Ok(()),
        }
    }

    /// `f^{(k)}(x)`.
    pub fn derivative(&self, k: &MultiIndex, x: &[f64]) -> Result<f64, FunctionError> {
        self.check_derivative(k)?;
        Ok(self.derivative_unchecked(k.entries(), x))
    }

    /// The derivative `f^{(k)}` as an evaluatable function.
    pub fn derivative_fn(&self, k: &MultiIndex) -> Result<Derivative, FunctionError> {
        self.check_derivative(k)?;
        Ok(Derivative {
            f: self.clone(),
            k: k.clone(),
        })
    }

    fn derivative_unchecked(&self, k: &[usize], x: &[f64]) -> f64 {
        match &*self.kind {
            Kind::Polynomial { extents, coeffs } => poly_derivative(extents, coeffs, k, x),
            Kind::Exp { rate } => {
                let dot: f64 = rate.iter().zip(x).map(|(a, v)| a * v).sum();
                let factor: f64 = rate
                    .iter()
                    .zip(k)
                    .map(|(a, &n)| a.powi(n as i32))
                    .product();
                factor * dot.exp()
            }
            Kind::SinProduct { freq, phase } => (0..self.dim)
                .map(|i| {
                    let shift = k[i] as f64 * std::f64::consts::FRAC_PI_2;
                    freq[i].powi(k[i] as i32) * (freq[i] * x[i] + phase[i] + shift).sin()
                })
                .product(),
            Kind::Runge { scale } => (0..self.dim)
                .map(|i| runge_factor_derivative(*scale, k[i], x[i]))
                .product(),
            Kind::AbsPow { center, alpha } => {
                debug_assert!(k.iter().all(|&n| n == 0));
                center
                    .iter()
                    .zip(x)
                    .map(|(c, v)| {
                        let a = (v - c).abs();
                        if *alpha == 0.5 {
                            a.sqrt()
                        } else {
                            a.powf(*alpha)
                        }
                    })
                    .product()
            }
            Kind::Scaled { factor, inner } => factor * inner.derivative_unchecked(k, x),
            Kind::Sum { left, right } => {
                left.derivative_unchecked(k, x) + right.derivative_unchecked(k, x)
            }
            Kind::Affine {
                inner,
                offset,
                scale,
            } => {
                let y: Vec<f64> = (0..self.dim).map(|i| offset[i] + scale[i] * x[i]).collect();
                let jac: f64 = scale
                    .iter()
                    .zip(k)
                    .map(|(s, &n)| s.powi(n as i32))
                    .product();
                jac * inner.derivative_unchecked(k, &y)
            }
        }
    }
}

impl Evaluate for FunctionSpec {
    fn dim(&self) -> usize {
        self.dim
    }

    fn eval(&self, x: &[f64]) -> f64 {
        const ZERO: [usize; 16] = [0; 16];
        if self.dim <= ZERO.len() {
            self.derivative_unchecked(&ZERO[..self.dim], x)
        } else {
            self.derivative_unchecked(&vec![0; self.dim], x)
        }
    }
}

impl fmt::Display for FunctionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} [d={}, {}]", self.id, self.dim, self.class)
    }
}

/// A fixed mixed derivative `f^{(k)}` of a Sobolev-tagged function.
#[derive(Debug, Clone)]
pub struct Derivative {
    f: FunctionSpec,
    k: MultiIndex,
}

impl Derivative {
    pub fn order(&self) -> &MultiIndex {
        &self.k
    }
}

impl Evaluate for Derivative {
    fn dim(&self) -> usize {
        self.f.dim
    }

    fn eval(&self, x: &[f64]) -> f64 {
        self.f.derivative_unchecked(self.k.entries(), x)
    }
}

fn falling_factorial(n: usize, k: usize) -> f64 {
    (0..k).map(|j| (n - j) as f64).product()
}

fn poly_derivative(extents: &MultiIndex, coeffs: &[f64], k: &[usize], x: &[f64]) -> f64 {
    contract(extents.entries(), coeffs, k, x)
}

/// Sums `c_alpha prod_i d^{k_i}/dx^{k_i} x_i^{alpha_i}` one axis at a time.
fn contract(extents: &[usize], coeffs: &[f64], k: &[usize], x: &[f64]) -> f64 {
    let n = extents[0];
    let stride = coeffs.len() / n;
    let mut acc = 0.0;
    let mut pow = 1.0;
    for m in k[0]..n {
        let block = &coeffs[m * stride..(m + 1) * stride];
        let inner = if extents.len() == 1 {
            block[0]
        } else {
            contract(&extents[1..], block, &k[1..], &x[1..])
        };
        acc += falling_factorial(m, k[0]) * pow * inner;
        pow *= x[0];
    }
    acc
}

/// `d^n/dx^n 1/(1 + s^2 x^2)`, using `1/(1+u^2) = Im 1/(u - i)`.
fn runge_factor_derivative(scale: f64, n: usize, x: f64) -> f64 {
    let u = Complex64::new(scale * x, -1.0);
    let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
    let fact: f64 = (1..=n).map(|j| j as f64).product();
    let z = u.powi(-((n + 1) as i32));
    sign * fact * scale.powi(n as i32) * z.im
}

/// The built-in corpus for `d = 1` and `d = 2`.
pub fn corpus() -> Vec<FunctionSpec> {
    let mut out = Vec::new();
    for dim in [1usize, 2] {
        for degree in 0..=3 {
            out.push(FunctionSpec::corpus_polynomial(dim, degree));
        }
    }
    out.push(FunctionSpec::exp("exp_d1", vec![1.0]));
    out.push(FunctionSpec::sin_product("sin_d1", vec![3.0], vec![0.4]));
    out.push(FunctionSpec::runge("runge_d1", 1));
    out.push(FunctionSpec::abs_pow("abspow_d1", vec![0.03], 0.5));
    out.push(FunctionSpec::exp("exp_d2", vec![1.0, 1.0]));
    out.push(FunctionSpec::sin_product("sin_d2", vec![3.0, 2.0], vec![0.4, 0.9]));
    out.push(FunctionSpec::runge("runge_d2", 2));
    out.push(FunctionSpec::abs_pow("abspow_d2", vec![0.03, 0.03], 0.5));
    out
}

/// Corpus entry by id.
pub fn lookup(id: &str) -> Result<FunctionSpec, FunctionError> {
    corpus()
        .into_iter()
        .find(|f| f.id() == id)
        .ok_or_else(|| FunctionError::UnknownId(id.to_string()))
}

/// `||f||_{W^r_p(Q)} = sum over all subsets e of ||f^{(r(e))}||_{p,Q}`.
pub fn sobolev_norm(
    f: &FunctionSpec,
    r: &MultiIndex,
    p: Exponent,
    q: &Parallelepiped,
    quad: &QuadratureSpec,
) -> Result<f64, FunctionError> {
    if !f.is_sobolev() {
        return Err(FunctionError::NotSobolev { id: f.id.clone() });
    }
    f.check_derivative(r)?;
    let mut total = 0.0;
    for e in SubsetMask::all(f.dim()) {
        let deriv = f.derivative_fn(&e.project(r))?;
        total += lp_norm(|x| deriv.eval(x), q, p, quad);
    }
    Ok(total)
}
