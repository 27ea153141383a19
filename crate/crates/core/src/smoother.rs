//! Cardinal B-splines, the averaging operators `P^k_t` and `P^r_t`, and
//! computable brackets for the mixed K-functional.

use std::fmt;

use rayon::prelude::*;
use thiserror::Error;

use crate::differences::{modulus_terms, univariate_difference, DifferenceError, ModulusRequest, Stencil};
use crate::functions::{Evaluate, FunctionSpec};
use crate::geometry::{
    binomial, gauss_legendre, lp_norm, whitney_lower_constant, Exponent, MultiIndex,
    Parallelepiped, QuadratureSpec, StepVector, SubsetMask,
};
use crate::polyapprox::{best_approx, taylor_poly, ApproxError, FitConfig};

#[derive(Error, Debug, Clone, PartialEq)]
pub enum SmootherError {
    #[error("smoothing order must be at least one, got {0}")]
    OrderNotPositive(MultiIndex),

    #[error("axis {axis}: step {t} exceeds the admissible bound {bound}")]
    StepTooLarge { axis: usize, t: f64, bound: f64 },

    #[error("axis {axis}: step {t} must be finite and non-negative")]
    InvalidStep { axis: usize, t: f64 },

    #[error("axis {axis}: derivative needs a positive step")]
    ZeroStep { axis: usize },

    #[error("the coordinate subset must be non-empty")]
    EmptySubset,

    #[error("axis {0} is out of range")]
    AxisOutOfRange(usize),

    #[error("dimension mismatch: {what} has dimension {found}, expected {expected}")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        found: usize,
    },

    #[error(transparent)]
    Difference(#[from] DifferenceError),

    #[error(transparent)]
    Approx(#[from] ApproxError),
}

/// `M_k(x)`: the cardinal B-spline of order `k` on knots `0, ..., k`.
pub fn bspline_eval(k: usize, x: f64) -> f64 {
    assert!(k >= 1, "B-spline order must be positive");
    if !(0.0..k as f64).contains(&x) {
        return 0.0;
    }
    // order-1 pieces N_{j,1} on [j, j+1), then raise the order in place
    let mut n: Vec<f64> = (0..k)
        .map(|j| if (j as f64) <= x && x < (j + 1) as f64 { 1.0 } else { 0.0 })
        .collect();
    for m in 2..=k {
        let denom = (m - 1) as f64;
        for j in 0..=(k - m) {
            let left = (x - j as f64) * n[j];
            let right = ((j + m) as f64 - x) * n[j + 1];
            n[j] = (left + right) / denom;
        }
    }
    n[0]
}

/// Which end of the axis the smoothing stencil reaches towards.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Orientation {
    /// Offsets `+j t h`; valid on `[a, b - (b - a)/4]`.
    Forward,
    /// Offsets `-j t h`; valid on `[a + (b - a)/4, b]`.
    Backward,
}

impl Orientation {
    fn sign(self) -> f64 {
        match self {
            Orientation::Forward => 1.0,
            Orientation::Backward => -1.0,
        }
    }

    /// Orientation per axis that makes the smoother valid on `Q_e`.
    pub fn for_subdomain(e: SubsetMask) -> Vec<Orientation> {
        (0..e.dim())
            .map(|i| {
                if e.contains(i) {
                    Orientation::Forward
                } else {
                    Orientation::Backward
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SmootherConfig {
    /// Gauss-Legendre nodes on each knot interval `[m, m + 1]` of `M_k`.
    pub knot_nodes: usize,
}

impl SmootherConfig {
    pub const DEFAULT_KNOT_NODES: usize = 16;
}

impl Default for SmootherConfig {
    fn default() -> Self {
        SmootherConfig {
            knot_nodes: Self::DEFAULT_KNOT_NODES,
        }
    }
}

/// `t_bar = (b_i - a_i) / (4 k^2)`.
pub fn step_bound(q: &Parallelepiped, axis: usize, k: usize) -> f64 {
    let len = q.upper()[axis] - q.lower()[axis];
    len / (4 * k * k) as f64
}

/// `t_bar` on every axis for the order vector `r`.
pub fn step_bounds(q: &Parallelepiped, r: &MultiIndex) -> StepVector {
    StepVector::new((0..q.dim()).map(|i| step_bound(q, i, r.get(i))).collect())
}

fn check_step(q: &Parallelepiped, axis: usize, k: usize, t: f64) -> Result<(), SmootherError> {
    if !t.is_finite() || t < 0.0 {
        return Err(SmootherError::InvalidStep { axis, t });
    }
    let bound = step_bound(q, axis, k);
    if t > bound * (1.0 + 1e-12) {
        return Err(SmootherError::StepTooLarge { axis, t, bound });
    }
    Ok(())
}

/// Stencil of `P^k_t` along one axis; `t` carries the orientation sign.
fn smoothing_axis(k: usize, t: f64, cfg: &SmootherConfig) -> Vec<(f64, f64)> {
    if t == 0.0 {
        return vec![(0.0, 1.0)];
    }
    let rule = gauss_legendre(cfg.knot_nodes);
    let mut nodes = Vec::with_capacity(k * cfg.knot_nodes);
    for m in 0..k {
        let (x, w) = rule.mapped(m as f64, (m + 1) as f64);
        for (h, wh) in x.into_iter().zip(w) {
            nodes.push((h, wh * bspline_eval(k, h)));
        }
    }
    let outer = if (k + 1) % 2 == 0 { 1.0 } else { -1.0 };
    let mass: f64 = nodes.iter().map(|&(_, w)| w).sum();
    let mut out = Vec::with_capacity(1 + k * nodes.len());
    // the j = 0 term of the difference is (-1)^k phi(x), which folds into x itself
    out.push((0.0, 1.0 - mass));
    for j in 1..=k {
        let inner = if (k - j) % 2 == 0 { 1.0 } else { -1.0 };
        let c = outer * inner * binomial(k, j);
        for &(h, w) in &nodes {
            out.push((j as f64 * t * h, c * w));
        }
    }
    out
}

/// `(P^k_t)^{(k)} = sum_{j=1}^k (-1)^{j+1} C(k, j) (j t)^{-k} Delta^k_{j t}` along one axis.
fn derivative_axis(k: usize, t: f64) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(k * (k + 1));
    for j in 1..=k {
        let sign = if (j + 1) % 2 == 0 { 1.0 } else { -1.0 };
        let c = sign * binomial(k, j) / (j as f64 * t).powi(k as i32);
        for (o, w) in univariate_difference(k, j as f64 * t) {
            out.push((o, c * w));
        }
    }
    out
}

fn valid_interval(q: &Parallelepiped, axis: usize, orient: Orientation) -> (f64, f64) {
    let (a, b) = (q.lower()[axis], q.upper()[axis]);
    let quarter = (b - a) / 4.0;
    match orient {
        Orientation::Forward => (a, b - quarter),
        Orientation::Backward => (a + quarter, b),
    }
}

/// `f` composed with a fixed stencil, together with the box on which the
/// stencil stays inside the original domain.
#[derive(Debug, Clone)]
pub struct Smoothed<F> {
    f: F,
    stencil: Stencil,
    valid: Parallelepiped,
}

impl<F: Evaluate> Smoothed<F> {
    pub fn valid_domain(&self) -> &Parallelepiped {
        &self.valid
    }

    pub fn stencil(&self) -> &Stencil {
        &self.stencil
    }

    pub fn inner(&self) -> &F {
        &self.f
    }
}

impl<F: Evaluate> Evaluate for Smoothed<F> {
    fn dim(&self) -> usize {
        self.f.dim()
    }

    fn eval(&self, x: &[f64]) -> f64 {
        self.stencil.apply(&self.f, x)
    }
}

fn check_dims<F: Evaluate>(f: &F, r: &MultiIndex, t: &StepVector, q: &Parallelepiped) -> Result<(), SmootherError> {
    let d = q.dim();
    for (what, found) in [("function", f.dim()), ("order", r.dim()), ("step", t.dim())] {
        if found != d {
            return Err(SmootherError::DimensionMismatch {
                what,
                expected: d,
                found,
            });
        }
    }
    if !r.is_positive() {
        return Err(SmootherError::OrderNotPositive(r.clone()));
    }
    Ok(())
}

/// `P^k_{t,i}(f)` along `axis`, forward oriented.
pub fn smooth_univariate<F: Evaluate>(
    f: F,
    k: usize,
    t: f64,
    axis: usize,
    q: &Parallelepiped,
    cfg: &SmootherConfig,
) -> Result<Smoothed<F>, SmootherError> {
    let d = q.dim();
    if f.dim() != d {
        return Err(SmootherError::DimensionMismatch {
            what: "function",
            expected: d,
            found: f.dim(),
        });
    }
    if axis >= d {
        return Err(SmootherError::AxisOutOfRange(axis));
    }
    if k == 0 {
        return Err(SmootherError::OrderNotPositive(MultiIndex::unit(d, axis)));
    }
    check_step(q, axis, k, t)?;
    let axes: Vec<Vec<(f64, f64)>> = (0..d)
        .map(|i| {
            if i == axis {
                smoothing_axis(k, t, cfg)
            } else {
                vec![(0.0, 1.0)]
            }
        })
        .collect();
    let mut lower = q.lower().to_vec();
    let mut upper = q.upper().to_vec();
    let (lo, hi) = valid_interval(q, axis, Orientation::Forward);
    lower[axis] = lo;
    upper[axis] = hi;
    Ok(Smoothed {
        f,
        stencil: Stencil::tensor(&axes),
        valid: Parallelepiped::closed_unchecked(lower, upper),
    })
}

/// `P^r_t(f)`, forward oriented on every axis; valid on `Q_{[d]}`.
pub fn smooth_mixed<F: Evaluate>(
    f: F,
    r: &MultiIndex,
    t: &StepVector,
    q: &Parallelepiped,
    cfg: &SmootherConfig,
) -> Result<Smoothed<F>, SmootherError> {
    let orient = vec![Orientation::Forward; q.dim()];
    smooth_mixed_oriented(f, r, t, q, &orient, cfg)
}

/// `P^r_t(f)` with a chosen orientation per axis.
pub fn smooth_mixed_oriented<F: Evaluate>(
    f: F,
    r: &MultiIndex,
    t: &StepVector,
    q: &Parallelepiped,
    orient: &[Orientation],
    cfg: &SmootherConfig,
) -> Result<Smoothed<F>, SmootherError> {
    build(f, r, t, q, orient, SubsetMask::empty(q.dim()), cfg)
}

/// `(P^r_t f)^{(r(e))}` on `Q_{[d]}`.
pub fn smoothed_derivative<F: Evaluate>(
    f: F,
    r: &MultiIndex,
    t: &StepVector,
    e: SubsetMask,
    q: &Parallelepiped,
    cfg: &SmootherConfig,
) -> Result<Smoothed<F>, SmootherError> {
    let orient = vec![Orientation::Forward; q.dim()];
    smoothed_derivative_oriented(f, r, t, e, q, &orient, cfg)
}

pub fn smoothed_derivative_oriented<F: Evaluate>(
    f: F,
    r: &MultiIndex,
    t: &StepVector,
    e: SubsetMask,
    q: &Parallelepiped,
    orient: &[Orientation],
    cfg: &SmootherConfig,
) -> Result<Smoothed<F>, SmootherError> {
    if e.is_empty() {
        return Err(SmootherError::EmptySubset);
    }
    build(f, r, t, q, orient, e, cfg)
}

fn build<F: Evaluate>(
    f: F,
    r: &MultiIndex,
    t: &StepVector,
    q: &Parallelepiped,
    orient: &[Orientation],
    e: SubsetMask,
    cfg: &SmootherConfig,
) -> Result<Smoothed<F>, SmootherError> {
    check_dims(&f, r, t, q)?;
    let d = q.dim();
    if orient.len() != d || e.dim() != d {
        return Err(SmootherError::DimensionMismatch {
            what: if orient.len() != d { "orientation" } else { "subset" },
            expected: d,
            found: if orient.len() != d { orient.len() } else { e.dim() },
        });
    }
    let mut axes = Vec::with_capacity(d);
    let mut lower = Vec::with_capacity(d);
    let mut upper = Vec::with_capacity(d);
    for i in 0..d {
        let k = r.get(i);
        check_step(q, i, k, t.get(i))?;
        let signed = orient[i].sign() * t.get(i);
        if e.contains(i) {
            if t.get(i) == 0.0 {
                return Err(SmootherError::ZeroStep { axis: i });
            }
            axes.push(derivative_axis(k, signed));
        } else {
            axes.push(smoothing_axis(k, signed, cfg));
        }
        let (lo, hi) = valid_interval(q, i, orient[i]);
        lower.push(lo);
        upper.push(hi);
    }
    Ok(Smoothed {
        f,
        stencil: Stencil::tensor(&axes),
        valid: Parallelepiped::closed_unchecked(lower, upper),
    })
}

/// Settings for K-functional brackets.
#[derive(Debug, Clone)]
pub struct KConfig {
    pub quad: QuadratureSpec,
    /// Sup-search resolution for the lower bound `Omega_r`.
    pub h_grid: usize,
    pub smoother: SmootherConfig,
    /// Glue the per-subdomain smoother values into the `Q`-level upper bound.
    pub combine_subdomains: bool,
}

impl Default for KConfig {
    fn default() -> Self {
        KConfig {
            quad: QuadratureSpec::default(),
            h_grid: ModulusRequest::DEFAULT_H_GRID,
            smoother: SmootherConfig::default(),
            combine_subdomains: true,
        }
    }
}

/// The function `g` behind a K-functional value.
#[derive(Debug, Clone, PartialEq)]
pub enum Witness {
    Zero,
    /// `g = f`.
    Identity,
    /// `L_2` projection onto `P_r`.
    Projection,
    /// `P^r_t(f)` oriented towards each `Q_e`, summed over subdomains.
    Smoother { t: StepVector },
    /// `T_r(g_bar)` anchored at `anchor`, with `g_bar` the best candidate at `t_bar`.
    Taylor { anchor: Vec<f64>, base: Box<Witness> },
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Witness::Zero => write!(f, "zero"),
            Witness::Identity => write!(f, "identity"),
            Witness::Projection => write!(f, "l2-projection"),
            Witness::Smoother { t } => write!(f, "smoother(t={t})"),
            Witness::Taylor { anchor, base } => {
                let a: Vec<String> = anchor.iter().map(|v| v.to_string()).collect();
                write!(f, "taylor(anchor={}, base={base})", a.join("x"))
            }
        }
    }
}

/// Contributions of the smoother candidate on one subdomain `Q_e`.
#[derive(Debug, Clone, PartialEq)]
pub struct SubdomainTerms {
    pub e: SubsetMask,
    /// `||f - g_t||_{p,Q_e}`.
    pub residual: f64,
    /// `t^{r(e')} ||g_t^{(r(e'))}||_{p,Q_e}` per non-empty `e'`.
    pub derivatives: Vec<(SubsetMask, f64)>,
}

impl SubdomainTerms {
    pub fn value(&self) -> f64 {
        self.residual + self.derivatives.iter().map(|(_, v)| v).sum::<f64>()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct KBracket {
    pub lower: f64,
    pub upper: f64,
    /// `Omega_r(f, t)_{p,Q}` behind the lower bound.
    pub omega: f64,
    /// `omega_{r(e)}(f, t)_{p,Q}` per non-empty `e`.
    pub omega_terms: Vec<(SubsetMask, f64)>,
    pub witness: Witness,
    /// Every candidate that was evaluated, in evaluation order.
    pub candidates: Vec<(Witness, f64)>,
    /// Smoother terms per subdomain; empty when `t > t_bar`.
    pub subdomains: Vec<SubdomainTerms>,
}

/// Functional value of a polynomial candidate: derivatives of order `r` vanish.
fn residual_norm(f: &FunctionSpec, g: &dyn Evaluate, p: Exponent, q: &Parallelepiped, quad: &QuadratureSpec) -> f64 {
    lp_norm(|x| f.eval(x) - g.eval(x), q, p, quad)
}

fn identity_value(
    f: &FunctionSpec,
    r: &MultiIndex,
    t: &StepVector,
    p: Exponent,
    q: &Parallelepiped,
    quad: &QuadratureSpec,
) -> Option<f64> {
    if !f.is_sobolev() || f.check_derivative(r).is_err() {
        return None;
    }
    let mut total = 0.0;
    for e in SubsetMask::nonempty(f.dim()) {
        let deriv = f.derivative_fn(&e.project(r)).ok()?;
        total += t.subset_weight(r, e) * lp_norm(|x| deriv.eval(x), q, p, quad);
    }
    Some(total)
}

/// Smoother candidate terms on every `Q_e`, with `g_t = P^r_t(f)` oriented
/// towards `Q_e`. Requires `t <= t_bar`.
pub fn smoother_terms(
    f: &FunctionSpec,
    r: &MultiIndex,
    t: &StepVector,
    p: Exponent,
    q: &Parallelepiped,
    cfg: &KConfig,
) -> Result<Vec<SubdomainTerms>, SmootherError> {
    check_dims(&f, r, t, q)?;
    for i in 0..q.dim() {
        check_step(q, i, r.get(i), t.get(i))?;
    }
    let d = q.dim();
    q.subdomains()
        .into_par_iter()
        .map(|(e, qe)| {
            let orient = Orientation::for_subdomain(e);
            let g = smooth_mixed_oriented(f, r, t, q, &orient, &cfg.smoother)?;
            let residual = lp_norm(|x| f.eval(x) - g.eval(x), &qe, p, &cfg.quad);
            let mut derivatives = Vec::new();
            for e2 in SubsetMask::nonempty(d) {
                let weight = t.subset_weight(r, e2);
                let value = if weight == 0.0 {
                    0.0
                } else {
                    let dg = smoothed_derivative_oriented(f, r, t, e2, q, &orient, &cfg.smoother)?;
                    weight * lp_norm(|x| dg.eval(x), &qe, p, &cfg.quad)
                };
                derivatives.push((e2, value));
            }
            Ok(SubdomainTerms {
                e,
                residual,
                derivatives,
            })
        })
        .collect()
}

fn argmin(candidates: &[(Witness, f64)]) -> (Witness, f64) {
    let mut best = candidates[0].clone();
    for c in &candidates[1..] {
        if c.1 < best.1 {
            best = c.clone();
        }
    }
    best
}

/// Two-sided bracket for `K_r(f, t^r)_{p,Q}`.
///
/// `lower = Omega_r(f, t)_{p,Q} / prod_i (1 + 2^{r_i})`; `upper` is the best
/// value over the candidate family `{0, f, L_2 projection, P^r_t(f), T_r(g_bar)}`.
pub fn k_functional_bracket(
    f: &FunctionSpec,
    r: &MultiIndex,
    t: &StepVector,
    p: Exponent,
    q: &Parallelepiped,
    cfg: &KConfig,
) -> Result<KBracket, SmootherError> {
    check_dims(&f, r, t, q)?;
    for (axis, &ti) in t.entries().iter().enumerate() {
        if !(ti.is_finite() && ti > 0.0) {
            return Err(SmootherError::InvalidStep { axis, t: ti });
        }
    }
    let quad = &cfg.quad;
    let req = ModulusRequest::new(f, r, SubsetMask::full(q.dim()), t, p, q, quad).with_h_grid(cfg.h_grid);
    let omega_terms = modulus_terms(&req)?;
    let omega: f64 = omega_terms.iter().map(|(_, v)| v).sum();
    let lower = omega / whitney_lower_constant(r);

    let norm_f = lp_norm(|x| f.eval(x), q, p, quad);
    let fit = FitConfig::new(quad.clone());
    let projection = best_approx(f, r, Exponent::TWO, q, &fit)?.poly;
    let proj_value = residual_norm(f, &projection, p, q, quad);

    let base_family = |tt: &StepVector| {
        let mut c = vec![(Witness::Zero, norm_f)];
        if let Some(v) = identity_value(f, r, tt, p, q, quad) {
            c.push((Witness::Identity, v));
        }
        c.push((Witness::Projection, proj_value));
        c
    };
    let mut candidates = base_family(t);

    let bounds = step_bounds(q, r);
    let mut subdomains = Vec::new();
    if t.le(&bounds) {
        subdomains = smoother_terms(f, r, t, p, q, cfg)?;
        if cfg.combine_subdomains {
            let glued = subdomains.iter().map(SubdomainTerms::value).sum();
            candidates.push((Witness::Smoother { t: t.clone() }, glued));
        }
    } else {
        let (base, _) = argmin(&base_family(&bounds));
        let anchor = q.lower().to_vec();
        let value = match &base {
            Witness::Zero => Some(norm_f),
            Witness::Projection => Some(proj_value),
            Witness::Identity => taylor_poly(f, r, &anchor, q)
                .ok()
                .map(|tp| residual_norm(f, &tp, p, q, quad)),
            _ => None,
        };
        if let Some(v) = value {
            candidates.push((
                Witness::Taylor {
                    anchor,
                    base: Box::new(base),
                },
                v,
            ));
        }
    }
    let (witness, upper) = argmin(&candidates);
    Ok(KBracket {
        lower,
        upper,
        omega,
        omega_terms,
        witness,
        candidates,
        subdomains,
    })
}

/// Brackets along a sweep of steps.
///
/// The glued smoother built at any step of the sweep is a candidate at every
/// other step, with its derivative terms reweighted to that step.
pub fn k_functional_sweep<C>(
    f: &FunctionSpec,
    r: &MultiIndex,
    steps: &[StepVector],
    p: Exponent,
    q: &Parallelepiped,
    cfg_at: C,
) -> Result<Vec<KBracket>, SmootherError>
where
    C: Fn(&StepVector) -> KConfig + Sync,
{
    let mut brackets: Vec<KBracket> = steps
        .par_iter()
        .map(|t| k_functional_bracket(f, r, t, p, q, &cfg_at(t)))
        .collect::<Result<_, _>>()?;
    let built: Vec<(StepVector, Vec<SubdomainTerms>)> = brackets
        .iter()
        .zip(steps)
        .filter(|(b, _)| b.candidates.iter().any(|(w, _)| matches!(w, Witness::Smoother { .. })))
        .map(|(b, s)| (s.clone(), b.subdomains.clone()))
        .collect();
    for (b, t) in brackets.iter_mut().zip(steps) {
        for (s, terms) in &built {
            if s == t {
                continue;
            }
            let value: f64 = terms
                .iter()
                .map(|term| {
                    term.residual
                        + term
                            .derivatives
                            .iter()
                            .map(|(e, v)| {
                                let ws = s.subset_weight(r, *e);
                                if ws > 0.0 {
                                    v * t.subset_weight(r, *e) / ws
                                } else {
                                    0.0
                                }
                            })
                            .sum::<f64>()
                })
                .sum();
            b.candidates.push((Witness::Smoother { t: s.clone() }, value));
        }
        let (witness, upper) = argmin(&b.candidates);
        b.witness = witness;
        b.upper = upper;
    }
    Ok(brackets)
}

/// Upper brackets on `Q` and on each `Q_e`.
#[derive(Debug, Clone, PartialEq)]
pub struct SubdivisionReport {
    pub whole: KBracket,
    pub parts: Vec<(SubsetMask, KBracket)>,
    /// `upper(Q) / sum_e upper(Q_e)`; `None` when the denominator vanishes.
    pub ratio: Option<f64>,
}

/// Empirical constant of the subdivision inequality `K(Q) <= C sum_e K(Q_e)`.
pub fn subdivision_check(
    f: &FunctionSpec,
    r: &MultiIndex,
    t: &StepVector,
    p: Exponent,
    q: &Parallelepiped,
    cfg: &KConfig,
) -> Result<SubdivisionReport, SmootherError> {
    check_dims(&f, r, t, q)?;
    for i in 0..q.dim() {
        let bound = (q.upper()[i] - q.lower()[i]) / 2.0;
        if t.get(i) > bound * (1.0 + 1e-12) {
            return Err(SmootherError::StepTooLarge {
                axis: i,
                t: t.get(i),
                bound,
            });
        }
    }
    let whole = k_functional_bracket(f, r, t, p, q, cfg)?;
    let parts: Vec<(SubsetMask, KBracket)> = q
        .subdomains()
        .into_par_iter()
        .map(|(e, qe)| k_functional_bracket(f, r, t, p, &qe, cfg).map(|b| (e, b)))
        .collect::<Result<_, _>>()?;
    let denom: f64 = parts.iter().map(|(_, b)| b.upper).sum();
    let scale = lp_norm(|x| f.eval(x), q, p, &cfg.quad);
    let ratio = if denom > 1e-9 * scale && denom > 0.0 {
        Some(whole.upper / denom)
    } else {
        None
    };
    Ok(SubdivisionReport {
        whole,
        parts,
        ratio,
    })
}
