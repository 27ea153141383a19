//! Mixed differences and the four moduli of smoothness.
//!
//! `omega_{r(e)}` and `Omega_r` take a discretised supremum over steps; the
//! p-mean variants `w_{r(e)}` and `W_r` integrate over the symmetric step box.

use thiserror::Error;

use crate::functions::Evaluate;
use crate::geometry::{
    binomial, difference_domain, gauss_legendre, lp_norm, Exponent, MultiIndex, Parallelepiped,
    QuadratureSpec, StepVector, SubsetMask,
};

#[derive(Error, Debug, Clone, PartialEq)]
pub enum DifferenceError {
    #[error("the coordinate subset must be non-empty")]
    EmptySubset,

    #[error("sup search needs at least 2 step values per axis, got {0}")]
    GridTooCoarse(usize),

    #[error("mean modulus needs at least one outer quadrature node")]
    NoOuterNodes,

    #[error("dimension mismatch: {what} has dimension {found}, expected {expected}")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("step bound t must be finite and non-negative, got {0}")]
    InvalidStep(StepVector),

    #[error("order r must be at least one on every axis, got {0}")]
    OrderNotPositive(MultiIndex),
}

/// A weighted point stencil `g -> sum_j w_j g(x + o_j)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Stencil {
    dim: usize,
    offsets: Vec<f64>,
    weights: Vec<f64>,
}

impl Stencil {
    /// Tensor product of univariate stencils given as `(offset, weight)` lists.
    pub fn tensor(axes: &[Vec<(f64, f64)>]) -> Stencil {
        let dim = axes.len();
        let mut offsets = Vec::new();
        let mut weights = Vec::new();
        let extents = MultiIndex::new(axes.iter().map(Vec::len).collect());
        for idx in extents.iter_below() {
            let mut w = 1.0;
            for (axis, &j) in idx.entries().iter().enumerate() {
                let (o, wj) = axes[axis][j];
                offsets.push(o);
                w *= wj;
            }
            weights.push(w);
        }
        Stencil {
            dim,
            offsets,
            weights,
        }
    }

    /// The mixed difference `Delta_h^{r_e}`; axes with `r_e_i = 0` are left alone.
    pub fn difference(r_e: &MultiIndex, h: &StepVector) -> Stencil {
        assert_eq!(r_e.dim(), h.dim());
        let axes: Vec<Vec<(f64, f64)>> = (0..r_e.dim())
            .map(|i| univariate_difference(r_e.get(i), h.get(i)))
            .collect();
        Stencil::tensor(&axes)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn offset(&self, j: usize) -> &[f64] {
        &self.offsets[j * self.dim..(j + 1) * self.dim]
    }

    /// Applies the stencil at `x`, using `scratch` for the shifted points.
    #[inline]
    pub fn apply_with<F: Evaluate + ?Sized>(&self, f: &F, x: &[f64], scratch: &mut Vec<f64>) -> f64 {
        scratch.clear();
        scratch.extend_from_slice(x);
        let mut acc = 0.0;
        for (j, w) in self.weights.iter().enumerate() {
            let o = &self.offsets[j * self.dim..(j + 1) * self.dim];
            for i in 0..self.dim {
                scratch[i] = x[i] + o[i];
            }
            acc += w * f.eval(scratch);
        }
        acc
    }

    pub fn apply<F: Evaluate + ?Sized>(&self, f: &F, x: &[f64]) -> f64 {
        let mut scratch = Vec::with_capacity(self.dim);
        self.apply_with(f, x, &mut scratch)
    }
}

/// `Delta_h^m`: offsets `j h` with weights `(-1)^{m-j} C(m, j)`.
pub fn univariate_difference(m: usize, h: f64) -> Vec<(f64, f64)> {
    (0..=m)
        .map(|j| {
            let sign = if (m - j) % 2 == 0 { 1.0 } else { -1.0 };
            (j as f64 * h, sign * binomial(m, j))
        })
        .collect()
}

/// `(Delta_h^{r_e} f)(x)`.
pub fn mixed_difference<F: Evaluate + ?Sized>(f: &F, r_e: &MultiIndex, h: &StepVector, x: &[f64]) -> f64 {
    Stencil::difference(r_e, h).apply(f, x)
}

/// `||Delta_h^{r_e} f||_{p, Q_{r_e h}}`; zero when `Q_{r_e h}` is empty.
pub fn difference_norm<F: Evaluate + ?Sized>(
    f: &F,
    r_e: &MultiIndex,
    h: &StepVector,
    p: Exponent,
    q: &Parallelepiped,
    quad: &QuadratureSpec,
) -> f64 {
    let Some(domain) = difference_domain(q, r_e, h) else {
        return 0.0;
    };
    let stencil = Stencil::difference(r_e, h);
    let mut scratch = Vec::with_capacity(q.dim());
    lp_norm(|x| stencil.apply_with(f, x, &mut scratch), &domain, p, quad)
}

/// Inputs for a single-subset modulus.
#[derive(Clone, Copy)]
pub struct ModulusRequest<'a> {
    pub f: &'a dyn Evaluate,
    pub r: &'a MultiIndex,
    pub e: SubsetMask,
    pub t: &'a StepVector,
    pub p: Exponent,
    pub q: &'a Parallelepiped,
    pub quad: &'a QuadratureSpec,
    /// Step values per active axis in the sup search.
    pub h_grid: usize,
    /// Gauss-Legendre nodes per half-axis in the p-mean outer integral.
    pub mean_nodes: usize,
}

impl<'a> ModulusRequest<'a> {
    pub const DEFAULT_H_GRID: usize = 33;
    pub const DEFAULT_MEAN_NODES: usize = 16;

    pub fn new(
        f: &'a dyn Evaluate,
        r: &'a MultiIndex,
        e: SubsetMask,
        t: &'a StepVector,
        p: Exponent,
        q: &'a Parallelepiped,
        quad: &'a QuadratureSpec,
    ) -> Self {
        ModulusRequest {
            f,
            r,
            e,
            t,
            p,
            q,
            quad,
            h_grid: Self::DEFAULT_H_GRID,
            mean_nodes: Self::DEFAULT_MEAN_NODES,
        }
    }

    pub fn with_h_grid(mut self, h_grid: usize) -> Self {
        self.h_grid = h_grid;
        self
    }

    pub fn with_mean_nodes(mut self, nodes: usize) -> Self {
        self.mean_nodes = nodes;
        self
    }

    pub fn with_subset(mut self, e: SubsetMask) -> Self {
        self.e = e;
        self
    }

    fn validate(&self) -> Result<(), DifferenceError> {
        let d = self.q.dim();
        for (what, found) in [
            ("function", self.f.dim()),
            ("order", self.r.dim()),
            ("subset", self.e.dim()),
            ("step bound", self.t.dim()),
        ] {
            if found != d {
                return Err(DifferenceError::DimensionMismatch {
                    what,
                    expected: d,
                    found,
                });
            }
        }
        if self.e.is_empty() {
            return Err(DifferenceError::EmptySubset);
        }
        if self.h_grid < 2 {
            return Err(DifferenceError::GridTooCoarse(self.h_grid));
        }
        if self.t.entries().iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(DifferenceError::InvalidStep(self.t.clone()));
        }
        Ok(())
    }

    /// `t` clamped to the box size.
    fn clamped_t(&self) -> StepVector {
        let delta = self.q.size();
        if !self.t.le(&delta) {
            log::info!("step bound {} exceeds box size {}; clamping", self.t, delta);
        }
        StepVector::new(
            self.t
                .entries()
                .iter()
                .zip(delta.entries())
                .map(|(t, d)| t.min(*d))
                .collect(),
        )
    }
}

/// Per-axis values of a grid over the active axes; inactive axes carry `[0]`.
fn step_axes(e: SubsetMask, t: &StepVector, h_grid: usize, signed: bool) -> Vec<Vec<f64>> {
    (0..t.dim())
        .map(|i| {
            if !e.contains(i) {
                return vec![0.0];
            }
            let ti = t.get(i);
            let n = h_grid - 1;
            let mut vals: Vec<f64> = (0..=n)
                .map(|k| if k == n { ti } else { ti * k as f64 / n as f64 })
                .collect();
            if signed {
                let neg: Vec<f64> = vals.iter().skip(1).rev().map(|v| -v).collect();
                vals = neg.into_iter().chain(vals).collect();
            }
            vals
        })
        .collect()
}

fn sup_over_steps(req: &ModulusRequest<'_>, t: &StepVector, signed: bool) -> f64 {
    let r_e = req.e.project(req.r);
    let axes = step_axes(req.e, t, req.h_grid, signed);
    let extents = MultiIndex::new(axes.iter().map(Vec::len).collect());
    let mut best: f64 = 0.0;
    for idx in extents.iter_below() {
        let h = StepVector::new(
            idx.entries()
                .iter()
                .enumerate()
                .map(|(i, &k)| axes[i][k])
                .collect(),
        );
        let v = difference_norm(req.f, &r_e, &h, req.p, req.q, req.quad);
        if v.is_nan() || v > best {
            best = v;
        }
    }
    best
}

/// `omega_{r(e)}(f, t)_{p,Q}` as a sup over the non-negative step grid.
pub fn modulus(req: &ModulusRequest<'_>) -> Result<f64, DifferenceError> {
    req.validate()?;
    let t = req.clamped_t();
    Ok(sup_over_steps(req, &t, false))
}

/// Result of refining the sup grid once.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergenceReport {
    pub coarse: f64,
    pub fine: f64,
    pub relative_change: f64,
    pub converged: bool,
}

/// Recomputes the modulus with the step grid refined (spacing halved) and
/// reports the relative change against `tolerance`.
pub fn modulus_convergence(
    req: &ModulusRequest<'_>,
    tolerance: f64,
) -> Result<ConvergenceReport, DifferenceError> {
    let coarse = modulus(req)?;
    let fine_req = req.with_h_grid(2 * (req.h_grid - 1) + 1);
    let fine = modulus(&fine_req)?;
    let relative_change = if fine == coarse {
        0.0
    } else {
        (fine - coarse).abs() / fine.abs().max(coarse.abs())
    };
    Ok(ConvergenceReport {
        coarse,
        fine,
        relative_change,
        converged: relative_change < tolerance,
    })
}

fn check_total_order(r: &MultiIndex) -> Result<(), DifferenceError> {
    if !r.is_positive() {
        return Err(DifferenceError::OrderNotPositive(r.clone()));
    }
    Ok(())
}

/// `Omega_r(f, t)_{p,Q}`: sum of `omega_{r(e)}` over the non-empty subsets.
pub fn total_modulus(req: &ModulusRequest<'_>) -> Result<f64, DifferenceError> {
    check_total_order(req.r)?;
    let mut total = 0.0;
    for e in SubsetMask::nonempty(req.q.dim()) {
        total += modulus(&req.with_subset(e))?;
    }
    Ok(total)
}

/// Per-subset terms of `Omega_r`, in subset enumeration order.
pub fn modulus_terms(req: &ModulusRequest<'_>) -> Result<Vec<(SubsetMask, f64)>, DifferenceError> {
    check_total_order(req.r)?;
    SubsetMask::nonempty(req.q.dim())
        .map(|e| modulus(&req.with_subset(e)).map(|v| (e, v)))
        .collect()
}

/// `w_{r(e)}(f, t)_{p,Q}`.
///
/// For finite `p` the outer integral over `|h_i| <= t_i` runs per active axis
/// on `[-tau_i, 0]` and `[0, tau_i]` with `tau_i = min(t_i, delta_i / r_i)`,
/// beyond which `Q_{r(e)h}` is empty. For `p = inf` the mean is a sup over
/// the signed step grid.
pub fn p_mean_modulus(req: &ModulusRequest<'_>) -> Result<f64, DifferenceError> {
    req.validate()?;
    if req.mean_nodes == 0 {
        return Err(DifferenceError::NoOuterNodes);
    }
    let t = req.clamped_t();
    if req.e.members().any(|i| t.get(i) == 0.0) {
        return Ok(0.0);
    }
    if req.p.is_infinite() {
        return Ok(sup_over_steps(req, &t, true));
    }
    let r_e = req.e.project(req.r);
    let delta = req.q.size();
    let rule = gauss_legendre(req.mean_nodes);
    let axes: Vec<(Vec<f64>, Vec<f64>)> = (0..t.dim())
        .map(|i| {
            if !req.e.contains(i) {
                return (vec![0.0], vec![1.0]);
            }
            let tau = if r_e.get(i) == 0 {
                t.get(i)
            } else {
                t.get(i).min(delta.get(i) / r_e.get(i) as f64)
            };
            let (mut xs, mut ws) = rule.mapped(-tau, 0.0);
            let (xp, wp) = rule.mapped(0.0, tau);
            xs.extend(xp);
            ws.extend(wp);
            (xs, ws)
        })
        .collect();
    let extents = MultiIndex::new(axes.iter().map(|a| a.0.len()).collect());
    let mut acc = 0.0;
    for idx in extents.iter_below() {
        let mut w = 1.0;
        let h = StepVector::new(
            idx.entries()
                .iter()
                .enumerate()
                .map(|(i, &k)| {
                    w *= axes[i].1[k];
                    axes[i].0[k]
                })
                .collect(),
        );
        let Some(domain) = difference_domain(req.q, &r_e, &h) else {
            continue;
        };
        let stencil = Stencil::difference(&r_e, &h);
        let mut scratch = Vec::with_capacity(req.q.dim());
        let inner = crate::geometry::power_integral(
            |x| stencil.apply_with(req.f, x, &mut scratch),
            &domain,
            req.p,
            req.quad,
        );
        acc += w * inner;
    }
    let norm: f64 = req.e.members().map(|i| t.get(i)).product();
    Ok(req.p.root(acc / norm))
}

/// `W_r(f, t)_{p,Q}`: sum of `w_{r(e)}` over the non-empty subsets.
pub fn total_p_mean_modulus(req: &ModulusRequest<'_>) -> Result<f64, DifferenceError> {
    check_total_order(req.r)?;
    let mut total = 0.0;
    for e in SubsetMask::nonempty(req.q.dim()) {
        total += p_mean_modulus(&req.with_subset(e))?;
    }
    Ok(total)
}
