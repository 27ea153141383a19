use crate::functions::Evaluate;
use crate::geometry::{
    chebyshev_lobatto, gauss_legendre, integrate, lp_norm, Exponent, MultiIndex, Parallelepiped,
    QuadratureSpec,
};

use super::simplex::{self, LinearProgram};
use super::tensor_poly::{legendre_values, Basis, TensorPolynomial};
use super::ApproxError;

/// Settings shared by every best-approximation solve.
#[derive(Debug, Clone)]
pub struct FitConfig {
    /// Quadrature for the projection and the re-measured error. Sup-norm
    /// errors are measured on the sup grid merged with a uniform grid four
    /// times as fine.
    pub quad: QuadratureSpec,
    /// Fitting grid points per axis for `p = 1` and `p = inf`; `None` picks
    /// `max(4 r_i, 17)`.
    pub grid: Option<Vec<usize>>,
    /// When the re-measured error and the discrete optimum differ by more
    /// than [`FitConfig::AGREEMENT`]: for `p = 1` double the grid once, for
    /// `p = inf` move worst residual points into the grid (at most
    /// [`FitConfig::MAX_EXCHANGES`] times).
    pub auto_refine: bool,
}

impl FitConfig {
    pub const AGREEMENT: f64 = 0.02;
    /// Cap on exchange steps for `p = inf`.
    pub const MAX_EXCHANGES: usize = 16;

    pub fn new(quad: QuadratureSpec) -> Self {
        FitConfig {
            quad,
            grid: None,
            auto_refine: true,
        }
    }

    pub fn with_grid(mut self, grid: Vec<usize>) -> Self {
        self.grid = Some(grid);
        self
    }

    fn grid_for(&self, r: &MultiIndex) -> Vec<usize> {
        match &self.grid {
            Some(g) if g.len() == r.dim() => g.clone(),
            Some(g) if g.len() == 1 => vec![g[0]; r.dim()],
            _ => default_grid(r),
        }
    }
}

impl Default for FitConfig {
    fn default() -> Self {
        FitConfig::new(QuadratureSpec::default())
    }
}

/// `max(4 r_i, 17)` points per axis.
pub fn default_grid(r: &MultiIndex) -> Vec<usize> {
    r.entries().iter().map(|&k| (4 * k).max(17)).collect()
}

/// A near-best approximant and its error.
#[derive(Debug, Clone)]
pub struct BestApprox {
    pub poly: TensorPolynomial,
    /// `||f - poly||_{p,Q}` re-measured with the configured quadrature.
    pub error: f64,
    /// Optimum of the discrete problem (`None` for `p = 2`).
    pub discrete_error: Option<f64>,
    /// Fitting grid actually used.
    pub grid: Vec<usize>,
    pub refined: bool,
}

/// `E_r(f)_{p,Q}` for `p` in `{1, 2, inf}` with a minimiser from `P_r`.
pub fn best_approx(
    f: &dyn Evaluate,
    r: &MultiIndex,
    p: Exponent,
    q: &Parallelepiped,
    cfg: &FitConfig,
) -> Result<BestApprox, ApproxError> {
    if f.dim() != q.dim() || r.dim() != q.dim() {
        return Err(ApproxError::DimensionMismatch {
            expected: q.dim(),
            found: if f.dim() != q.dim() { f.dim() } else { r.dim() },
        });
    }
    if !r.is_positive() {
        return Err(ApproxError::OrderNotPositive(r.clone()));
    }
    let v = p.value();
    if v == 2.0 {
        return Ok(project_l2(f, r, q, &cfg.quad));
    }
    if !(v == 1.0 || p.is_infinite()) {
        return Err(ApproxError::UnsupportedExponent(p));
    }
    let grid = cfg.grid_for(r);
    for (axis, (&g, &k)) in grid.iter().zip(r.entries()).enumerate() {
        if g < 2 * k {
            return Err(ApproxError::GridTooCoarse {
                axis,
                points: g,
                needed: 2 * k,
            });
        }
    }
    let axes = initial_axes(p, q, &grid);
    let first = discrete_fit(f, r, p, q, &axes, &cfg.quad)?;
    let tol = 1e-12 * (1.0 + first.error.abs());
    let disagree = |fit: &BestApprox| {
        let d = fit.discrete_error.unwrap_or(fit.error);
        (fit.error - d).abs() > FitConfig::AGREEMENT * d.abs().max(fit.error.abs()) + tol
    };
    if !cfg.auto_refine || !disagree(&first) {
        return Ok(first);
    }
    if !p.is_infinite() {
        let finer: Vec<usize> = grid.iter().map(|&n| 2 * n).collect();
        log::debug!(
            "discrete error {:?} vs measured {}; refining grid to {:?}",
            first.discrete_error,
            first.error,
            finer
        );
        let mut second = discrete_fit(f, r, p, q, &initial_axes(p, q, &finer), &cfg.quad)?;
        second.refined = true;
        if disagree(&second) {
            log::debug!("fit still differs after refinement");
        }
        return Ok(second);
    }
    // exchange: move the worst residual point into the fitting grid
    let mut axes = axes;
    let mut best = first;
    let mut current = best.clone();
    for _ in 0..FitConfig::MAX_EXCHANGES {
        let (_, worst) = sup_residual(f, &current.poly, q, &cfg.quad);
        let mut grew = false;
        for (axis, &x) in worst.iter().enumerate() {
            grew |= insert_sorted(&mut axes[axis], x);
        }
        if !grew {
            break;
        }
        current = discrete_fit(f, r, p, q, &axes, &cfg.quad)?;
        current.refined = true;
        if current.error < best.error {
            best = current.clone();
        }
        if !disagree(&current) {
            break;
        }
    }
    if disagree(&best) {
        log::debug!(
            "minimax level {:?} and measured error {} still differ after exchanges",
            best.discrete_error,
            best.error
        );
    }
    Ok(best)
}

fn initial_axes(p: Exponent, q: &Parallelepiped, grid: &[usize]) -> Vec<Vec<f64>> {
    (0..q.dim())
        .map(|i| {
            let (a, b) = (q.lower()[i], q.upper()[i]);
            if p.is_infinite() {
                chebyshev_lobatto(a, b, grid[i])
            } else {
                gauss_legendre(grid[i]).mapped(a, b).0
            }
        })
        .collect()
}

fn insert_sorted(axis: &mut Vec<f64>, x: f64) -> bool {
    let scale = axis.last().map_or(1.0, |v| v.abs()).max(1.0);
    let pos = axis.partition_point(|&v| v < x);
    let near = |j: usize| axis.get(j).is_some_and(|&v| (v - x).abs() <= 1e-12 * scale);
    if near(pos) || (pos > 0 && near(pos - 1)) {
        return false;
    }
    axis.insert(pos, x);
    true
}

/// Check grid for sup-norm residuals: the Chebyshev-Lobatto sup grid merged
/// with a uniform grid four times as fine, so interior features are seen.
fn check_axes(q: &Parallelepiped, quad: &QuadratureSpec) -> Vec<Vec<f64>> {
    (0..q.dim())
        .map(|i| {
            let (a, b) = (q.lower()[i], q.upper()[i]);
            let n = quad.linf_points_on_axis(i);
            let m = 4 * (n - 1);
            let mut pts = chebyshev_lobatto(a, b, n);
            pts.extend((0..=m).map(|j| a + (b - a) * j as f64 / m as f64));
            pts.sort_by(f64::total_cmp);
            pts.dedup_by(|x, y| (*x - *y).abs() <= 1e-14 * (b - a));
            pts
        })
        .collect()
}

/// `max |f - poly|` over the check grid and a point attaining it.
fn sup_residual(
    f: &dyn Evaluate,
    poly: &TensorPolynomial,
    q: &Parallelepiped,
    quad: &QuadratureSpec,
) -> (f64, Vec<f64>) {
    let mut best: (f64, Vec<f64>) = (-1.0, q.lower().to_vec());
    for_each_point(&check_axes(q, quad), |x| {
        if best.0.is_nan() {
            return;
        }
        let v = (f.eval(x) - poly.evaluate(x)).abs();
        // NaN must win so that a broken fit is never reported as accurate
        if v.is_nan() || v > best.0 {
            best = (v, x.to_vec());
        }
    });
    best
}

fn for_each_point<F: FnMut(&[f64])>(axes: &[Vec<f64>], mut visit: F) {
    let extents = MultiIndex::new(axes.iter().map(Vec::len).collect());
    let mut x = vec![0.0; axes.len()];
    for idx in extents.iter_below() {
        for (i, &k) in idx.entries().iter().enumerate() {
            x[i] = axes[i][k];
        }
        visit(&x);
    }
}

fn legendre_design(r: &MultiIndex, q: &Parallelepiped, points: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let d = r.dim();
    let mut buf = Vec::new();
    points
        .iter()
        .map(|x| {
            let vals: Vec<Vec<f64>> = (0..d)
                .map(|i| {
                    let (a, b) = (q.lower()[i], q.upper()[i]);
                    legendre_values(2.0 * (x[i] - a) / (b - a) - 1.0, r.get(i), &mut buf);
                    buf.clone()
                })
                .collect();
            r.iter_below()
                .map(|alpha| {
                    alpha
                        .entries()
                        .iter()
                        .enumerate()
                        .map(|(i, &m)| vals[i][m])
                        .product()
                })
                .collect()
        })
        .collect()
}

fn project_l2(f: &dyn Evaluate, r: &MultiIndex, q: &Parallelepiped, quad: &QuadratureSpec) -> BestApprox {
    let grid = quad.gauss_grid(q);
    let points = grid.points();
    let weights = grid.tensor_weights();
    let values: Vec<f64> = points.iter().map(|x| f.eval(x)).collect();
    let design = legendre_design(r, q, &points);
    let size = q.size();
    let coeffs: Vec<f64> = r
        .iter_below()
        .enumerate()
        .map(|(col, alpha)| {
            let inner: f64 = (0..points.len())
                .map(|j| weights[j] * values[j] * design[j][col])
                .sum();
            let norm_sq: f64 = alpha
                .entries()
                .iter()
                .enumerate()
                .map(|(i, &m)| size.get(i) / (2 * m + 1) as f64)
                .product();
            inner / norm_sq
        })
        .collect();
    let poly = TensorPolynomial::new(
        r.clone(),
        coeffs,
        Basis::LegendreShifted { domain: q.clone() },
    )
    .expect("shape fixed by r");
    let error = lp_norm(|x| f.eval(x) - poly.evaluate(x), q, Exponent::TWO, quad);
    BestApprox {
        poly,
        error,
        discrete_error: None,
        grid: (0..r.dim()).map(|i| quad.nodes_on_axis(i)).collect(),
        refined: false,
    }
}

fn discrete_fit(
    f: &dyn Evaluate,
    r: &MultiIndex,
    p: Exponent,
    q: &Parallelepiped,
    axes: &[Vec<f64>],
    quad: &QuadratureSpec,
) -> Result<BestApprox, ApproxError> {
    let d = q.dim();
    let axis_weights: Vec<Vec<f64>> = (0..d)
        .map(|i| {
            if p.is_infinite() {
                vec![1.0; axes[i].len()]
            } else {
                gauss_legendre(axes[i].len()).mapped(q.lower()[i], q.upper()[i]).1
            }
        })
        .collect();
    let extents = MultiIndex::new(axes.iter().map(Vec::len).collect());
    let mut points = Vec::with_capacity(extents.box_volume());
    let mut weights = Vec::with_capacity(extents.box_volume());
    for idx in extents.iter_below() {
        let k = idx.entries();
        points.push((0..d).map(|i| axes[i][k[i]]).collect::<Vec<f64>>());
        weights.push((0..d).map(|i| axis_weights[i][k[i]]).product::<f64>());
    }
    let values: Vec<f64> = points.iter().map(|x| f.eval(x)).collect();
    if let Some(bad) = values.iter().position(|v| !v.is_finite()) {
        return Err(ApproxError::NonFiniteSample(points[bad].clone()));
    }
    let design = legendre_design(r, q, &points);
    let (coeffs, discrete) = if p.is_infinite() {
        minimax_lp(&values, &design)?
    } else {
        l1_lp(&values, &weights, &design)?
    };
    let poly = TensorPolynomial::new(
        r.clone(),
        coeffs,
        Basis::LegendreShifted { domain: q.clone() },
    )
    .expect("shape fixed by r");
    let error = if p.is_infinite() {
        sup_residual(f, &poly, q, quad).0
    } else {
        lp_norm(|x| f.eval(x) - poly.evaluate(x), q, p, quad)
    };
    Ok(BestApprox {
        poly,
        error,
        discrete_error: Some(discrete),
        grid: extents.entries().to_vec(),
        refined: false,
    })
}

fn solver_error(source: simplex::SimplexError, ncoef: usize, sign: f64) -> ApproxError {
    let incumbent = match &source {
        simplex::SimplexError::IterationLimit { incumbent, .. } => Some(
            incumbent.dual[..ncoef.min(incumbent.dual.len())]
                .iter()
                .map(|y| sign * y)
                .collect(),
        ),
        _ => None,
    };
    ApproxError::Solver { source, incumbent }
}

/// Minimax through the dual LP:
/// `min -sum f_j (l_j - m_j)` s.t. `sum_j Phi_ja (l_j - m_j) = 0`,
/// `sum_j (l_j + m_j) = 1`. The primal coefficients and level are the
/// negated equality multipliers.
fn minimax_lp(values: &[f64], design: &[Vec<f64>]) -> Result<(Vec<f64>, f64), ApproxError> {
    let npts = values.len();
    let ncoef = design[0].len();
    let mut cost = Vec::with_capacity(2 * npts);
    cost.extend(values.iter().map(|v| -v));
    cost.extend(values.iter().copied());
    let mut rows = Vec::with_capacity(ncoef + 1);
    for a in 0..ncoef {
        let mut row = Vec::with_capacity(2 * npts);
        row.extend(design.iter().map(|phi| phi[a]));
        row.extend(design.iter().map(|phi| -phi[a]));
        rows.push(row);
    }
    rows.push(vec![1.0; 2 * npts]);
    let mut rhs = vec![0.0; ncoef];
    rhs.push(1.0);
    let lp = LinearProgram { cost, rows, rhs };
    let sol = simplex::solve(&lp).map_err(|e| solver_error(e, ncoef, -1.0))?;
    let coeffs: Vec<f64> = sol.dual[..ncoef].iter().map(|y| -y).collect();
    let level = -sol.dual[ncoef];
    Ok((coeffs, level.max(0.0)))
}

/// Weighted discrete L1: `min sum w_j (s+_j + s-_j)` with
/// `Phi (c+ - c-) + s+ - s- = f`.
fn l1_lp(values: &[f64], weights: &[f64], design: &[Vec<f64>]) -> Result<(Vec<f64>, f64), ApproxError> {
    let npts = values.len();
    let ncoef = design[0].len();
    let nvar = 2 * ncoef + 2 * npts;
    let mut cost = vec![0.0; nvar];
    for j in 0..npts {
        cost[2 * ncoef + j] = weights[j];
        cost[2 * ncoef + npts + j] = weights[j];
    }
    let rows: Vec<Vec<f64>> = (0..npts)
        .map(|j| {
            let mut row = vec![0.0; nvar];
            for a in 0..ncoef {
                row[a] = design[j][a];
                row[ncoef + a] = -design[j][a];
            }
            row[2 * ncoef + j] = 1.0;
            row[2 * ncoef + npts + j] = -1.0;
            row
        })
        .collect();
    let lp = LinearProgram {
        cost,
        rows,
        rhs: values.to_vec(),
    };
    let sol = simplex::solve(&lp).map_err(|e| {
        let incumbent = match &e {
            simplex::SimplexError::IterationLimit { incumbent, .. } => {
                Some((0..ncoef).map(|a| incumbent.x[a] - incumbent.x[ncoef + a]).collect())
            }
            _ => None,
        };
        ApproxError::Solver {
            source: e,
            incumbent,
        }
    })?;
    let coeffs = (0..ncoef).map(|a| sol.x[a] - sol.x[ncoef + a]).collect();
    Ok((coeffs, sol.objective.max(0.0)))
}

/// Number of alternating near-extrema of a univariate residual: points where
/// `|res| >= (1 - rel_tol) * level`, grouped into runs of equal sign.
pub fn equioscillation_count(
    f: &dyn Evaluate,
    poly: &TensorPolynomial,
    q: &Parallelepiped,
    level: f64,
    rel_tol: f64,
    samples: usize,
) -> usize {
    assert_eq!(q.dim(), 1, "equioscillation is a univariate notion");
    let (a, b) = (q.lower()[0], q.upper()[0]);
    let mut count = 0;
    let mut last_sign = 0.0;
    for k in 0..samples {
        let x = if k + 1 == samples {
            b
        } else {
            a + (b - a) * k as f64 / (samples - 1) as f64
        };
        let res = f.eval(&[x]) - poly.evaluate(&[x]);
        if res.abs() >= (1.0 - rel_tol) * level {
            let s = res.signum();
            if s != last_sign {
                count += 1;
                last_sign = s;
            }
        }
    }
    count
}

/// `<g, h>` under the configured Gauss-Legendre rule.
pub fn inner_product(
    g: &dyn Evaluate,
    h: &dyn Evaluate,
    q: &Parallelepiped,
    quad: &QuadratureSpec,
) -> f64 {
    integrate(|x| g.eval(x) * h.eval(x), q, quad)
}
