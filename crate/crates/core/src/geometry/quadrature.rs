use std::collections::HashMap;
use std::f64::consts::PI;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::domain::Parallelepiped;
use super::GeometryError;

/// The integrability exponent `p` in `[1, inf]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Exponent(f64);

impl Exponent {
    pub const ONE: Exponent = Exponent(1.0);
    pub const TWO: Exponent = Exponent(2.0);
    pub const INFINITY: Exponent = Exponent(f64::INFINITY);

    pub fn new(p: f64) -> Result<Self, GeometryError> {
        if p.is_nan() || p < 1.0 {
            return Err(GeometryError::InvalidExponent(p));
        }
        Ok(Exponent(p))
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn is_infinite(self) -> bool {
        self.0.is_infinite()
    }

    /// `1/p`, zero for `p = inf`.
    pub fn reciprocal(self) -> f64 {
        if self.is_infinite() {
            0.0
        } else {
            1.0 / self.0
        }
    }

    /// `|v|^p` without going through `powf` for the common exponents.
    #[inline]
    pub fn power(self, v: f64) -> f64 {
        let a = v.abs();
        if self.0 == 1.0 {
            a
        } else if self.0 == 2.0 {
            a * a
        } else {
            a.powf(self.0)
        }
    }

    /// Inverse of [`Exponent::power`] applied to a non-negative integral.
    #[inline]
    pub fn root(self, v: f64) -> f64 {
        if self.0 == 1.0 {
            v
        } else if self.0 == 2.0 {
            v.sqrt()
        } else {
            v.powf(1.0 / self.0)
        }
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_infinite() {
            write!(f, "inf")
        } else {
            write!(f, "{}", self.0)
        }
    }
}

impl std::str::FromStr for Exponent {
    type Err = GeometryError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "inf" | "Inf" | "infinity" | "Infinity" => Ok(Exponent::INFINITY),
            other => other
                .parse::<f64>()
                .map_err(|_| GeometryError::UnparsableExponent(s.to_string()))
                .and_then(Exponent::new),
        }
    }
}

impl Serialize for Exponent {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        if self.is_infinite() {
            serializer.serialize_str("inf")
        } else {
            serializer.serialize_f64(self.0)
        }
    }
}

impl<'de> Deserialize<'de> for Exponent {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct ExponentVisitor;

        impl Visitor<'_> for ExponentVisitor {
            type Value = Exponent;

            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                write!(f, "a number >= 1 or the string \"inf\"")
            }

            fn visit_f64<E: de::Error>(self, v: f64) -> Result<Exponent, E> {
                Exponent::new(v).map_err(E::custom)
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Exponent, E> {
                self.visit_f64(v as f64)
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Exponent, E> {
                self.visit_f64(v as f64)
            }

            fn visit_str<E: de::Error>(self, v: &str) -> Result<Exponent, E> {
                if v == "inf" {
                    Ok(Exponent::INFINITY)
                } else {
                    Err(E::custom(GeometryError::UnparsableExponent(v.to_string())))
                }
            }
        }

        deserializer.deserialize_any(ExponentVisitor)
    }
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`, ascending.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    /// Newton iteration on `P_n` from the usual cosine initial guesses.
    pub fn compute(n: usize) -> Self {
        assert!(n >= 1, "Gauss-Legendre rule needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let m = n.div_ceil(2);
        for i in 0..m {
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() <= 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        GaussLegendre { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Nodes and weights mapped affinely onto `[a, b]`.
    pub fn mapped(&self, a: f64, b: f64) -> (Vec<f64>, Vec<f64>) {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        (
            self.nodes.iter().map(|x| mid + half * x).collect(),
            self.weights.iter().map(|w| half * w).collect(),
        )
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Shared, memoised Gauss-Legendre rule with `n` nodes.
pub fn gauss_legendre(n: usize) -> Arc<GaussLegendre> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<GaussLegendre>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().expect("quadrature cache poisoned");
    guard
        .entry(n)
        .or_insert_with(|| Arc::new(GaussLegendre::compute(n)))
        .clone()
}

/// `n` Chebyshev-Lobatto points on `[a, b]`, ascending, endpoints included.
pub fn chebyshev_lobatto(a: f64, b: f64, n: usize) -> Vec<f64> {
    assert!(n >= 2, "Chebyshev-Lobatto grid needs at least two points");
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    (0..n)
        .map(|k| {
            if k == 0 {
                a
            } else if k == n - 1 {
                b
            } else {
                mid - half * (PI * k as f64 / (n - 1) as f64).cos()
            }
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum QuadratureRule {
    GaussLegendre,
}

/// Tensor quadrature settings used for every norm and integral.
///
/// A single entry in `nodes_per_axis` or `linf_points_per_axis` applies to
/// every axis, so one spec can serve boxes of any dimension.
#[derive(Debug, Clone)]
pub struct QuadratureSpec {
    nodes_per_axis: Vec<usize>,
    linf_points_per_axis: Vec<usize>,
    rule: QuadratureRule,
    rules: Vec<Arc<GaussLegendre>>,
    grading: Option<Arc<Grading>>,
}

/// Composite refinement toward coordinates where the integrand is known to
/// be non-smooth.
///
/// On an axis that contains such points, each interval between them is split
/// into panels whose widths halve toward the point until they drop below
/// `floor`; every panel carries `panel_nodes` Gauss-Legendre nodes. Sup-norm
/// grids gain the panel edges and nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct Grading {
    pub points: Vec<Vec<f64>>,
    pub floor: f64,
    pub panel_nodes: usize,
}

impl Grading {
    fn points_in(&self, axis: usize, a: f64, b: f64) -> Vec<f64> {
        let mut pts: Vec<f64> = self
            .points
            .get(axis)
            .map(|p| p.iter().copied().filter(|c| *c >= a && *c <= b).collect())
            .unwrap_or_default();
        pts.sort_by(f64::total_cmp);
        pts.dedup_by(|x, kept| *x - *kept < self.floor);
        pts
    }

    /// Panel edges from `s` toward `far`, ordered outward from `s`.
    fn edges_toward(&self, s: f64, far: f64) -> Vec<f64> {
        let len = (far - s).abs();
        let mut out = vec![s];
        if len > 0.0 {
            let levels = (len / self.floor).log2().ceil().max(0.0) as i32;
            for m in (0..=levels).rev() {
                out.push(s + (far - s) * 0.5f64.powi(m));
            }
        }
        out
    }

    /// Sorted panel edges on `[a, b]`, or `None` when no point lies there.
    fn panels(&self, axis: usize, a: f64, b: f64) -> Option<Vec<f64>> {
        let pts = self.points_in(axis, a, b);
        if pts.is_empty() || b <= a {
            return None;
        }
        let mut cuts = vec![(a, pts[0] == a)];
        cuts.extend(pts.iter().filter(|c| **c > a && **c < b).map(|c| (*c, true)));
        cuts.push((b, pts[pts.len() - 1] == b));
        let mut edges = Vec::new();
        for w in cuts.windows(2) {
            let ((u, su), (v, sv)) = (w[0], w[1]);
            match (su, sv) {
                (true, true) => {
                    let mid = 0.5 * (u + v);
                    edges.extend(self.edges_toward(u, mid));
                    edges.extend(self.edges_toward(v, mid));
                }
                (true, false) => edges.extend(self.edges_toward(u, v)),
                (false, true) => edges.extend(self.edges_toward(v, u)),
                (false, false) => edges.extend([u, v]),
            }
        }
        edges.sort_by(f64::total_cmp);
        edges.dedup();
        Some(edges)
    }
}

impl QuadratureSpec {
    pub const DEFAULT_NODES: usize = 32;
    pub const DEFAULT_LINF_POINTS: usize = 65;

    pub fn new(
        nodes_per_axis: Vec<usize>,
        linf_points_per_axis: Vec<usize>,
    ) -> Result<Self, GeometryError> {
        if nodes_per_axis.is_empty() || nodes_per_axis.contains(&0) {
            return Err(GeometryError::InvalidQuadrature(
                "every axis needs at least one quadrature node".into(),
            ));
        }
        if linf_points_per_axis.is_empty() || linf_points_per_axis.iter().any(|&n| n < 2) {
            return Err(GeometryError::InvalidQuadrature(
                "sup-norm grids need at least two points per axis".into(),
            ));
        }
        let rules = nodes_per_axis.iter().map(|&n| gauss_legendre(n)).collect();
        Ok(QuadratureSpec {
            nodes_per_axis,
            linf_points_per_axis,
            rule: QuadratureRule::GaussLegendre,
            rules,
            grading: None,
        })
    }

    /// Same spec with composite panels graded toward `points` (one list per
    /// axis). Without any point the spec is returned unchanged.
    pub fn graded_toward(
        &self,
        points: Vec<Vec<f64>>,
        floor: f64,
        panel_nodes: usize,
    ) -> Result<Self, GeometryError> {
        if !(floor.is_finite() && floor > 0.0) {
            return Err(GeometryError::InvalidQuadrature(format!(
                "grading floor must be positive, got {floor}"
            )));
        }
        if panel_nodes == 0 {
            return Err(GeometryError::InvalidQuadrature(
                "graded panels need at least one node".into(),
            ));
        }
        let mut out = self.clone();
        out.grading = if points.iter().all(Vec::is_empty) {
            None
        } else {
            Some(Arc::new(Grading {
                points,
                floor,
                panel_nodes,
            }))
        };
        Ok(out)
    }

    pub fn grading(&self) -> Option<&Grading> {
        self.grading.as_deref()
    }

    pub fn uniform(nodes: usize, linf_points: usize) -> Result<Self, GeometryError> {
        QuadratureSpec::new(vec![nodes], vec![linf_points])
    }

    pub fn rule(&self) -> QuadratureRule {
        self.rule
    }

    pub fn nodes_on_axis(&self, axis: usize) -> usize {
        *self
            .nodes_per_axis
            .get(axis)
            .unwrap_or(&self.nodes_per_axis[0])
    }

    pub fn linf_points_on_axis(&self, axis: usize) -> usize {
        *self
            .linf_points_per_axis
            .get(axis)
            .unwrap_or(&self.linf_points_per_axis[0])
    }

    fn rule_on_axis(&self, axis: usize) -> &GaussLegendre {
        self.rules.get(axis).unwrap_or(&self.rules[0])
    }

    /// Same spec with node counts doubled on every axis.
    pub fn refined(&self) -> QuadratureSpec {
        QuadratureSpec::new(
            self.nodes_per_axis.iter().map(|n| 2 * n).collect(),
            self.linf_points_per_axis
                .iter()
                .map(|n| 2 * (n - 1) + 1)
                .collect(),
        )
        .map(|mut q| {
            q.grading = self.grading.as_ref().map(|g| {
                Arc::new(Grading {
                    panel_nodes: 2 * g.panel_nodes,
                    ..(**g).clone()
                })
            });
            q
        })
        .expect("refining a valid spec stays valid")
    }

    fn graded_axis(&self, axis: usize, a: f64, b: f64) -> Option<(Vec<f64>, Vec<f64>)> {
        let g = self.grading.as_ref()?;
        let edges = g.panels(axis, a, b)?;
        let rule = gauss_legendre(g.panel_nodes);
        let (mut x, mut w) = (Vec::new(), Vec::new());
        for e in edges.windows(2) {
            let (px, pw) = rule.mapped(e[0], e[1]);
            x.extend(px);
            w.extend(pw);
        }
        Some((x, w))
    }

    /// Tensor Gauss-Legendre grid on `domain`.
    pub fn gauss_grid(&self, domain: &Parallelepiped) -> TensorGrid {
        let mut axes = Vec::with_capacity(domain.dim());
        let mut weights = Vec::with_capacity(domain.dim());
        for i in 0..domain.dim() {
            let (a, b) = (domain.lower()[i], domain.upper()[i]);
            let (x, w) = self
                .graded_axis(i, a, b)
                .unwrap_or_else(|| self.rule_on_axis(i).mapped(a, b));
            axes.push(x);
            weights.push(w);
        }
        TensorGrid { axes, weights }
    }

    /// Tensor Chebyshev-Lobatto grid on `domain` for sup-norms (unit weights).
    pub fn sup_grid(&self, domain: &Parallelepiped) -> TensorGrid {
        let axes: Vec<Vec<f64>> = (0..domain.dim())
            .map(|i| {
                let (a, b) = (domain.lower()[i], domain.upper()[i]);
                let mut axis = chebyshev_lobatto(a, b, self.linf_points_on_axis(i));
                if let Some((nodes, _)) = self.graded_axis(i, a, b) {
                    axis.extend(nodes);
                    axis.extend(self.grading.as_ref().and_then(|g| g.panels(i, a, b)).unwrap_or_default());
                    axis.sort_by(f64::total_cmp);
                    axis.dedup();
                }
                axis
            })
            .collect();
        let weights = axes.iter().map(|a| vec![1.0; a.len()]).collect();
        TensorGrid { axes, weights }
    }
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec::uniform(Self::DEFAULT_NODES, Self::DEFAULT_LINF_POINTS)
            .expect("default quadrature is valid")
    }
}

/// Points and weights of a tensor product rule.
#[derive(Debug, Clone)]
pub struct TensorGrid {
    pub axes: Vec<Vec<f64>>,
    pub weights: Vec<Vec<f64>>,
}

impl TensorGrid {
    pub fn dim(&self) -> usize {
        self.axes.len()
    }

    pub fn len(&self) -> usize {
        self.axes.iter().map(Vec::len).product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Visits every node with its tensor weight, last axis fastest.
    pub fn for_each<F: FnMut(&[f64], f64)>(&self, mut visit: F) {
        let d = self.dim();
        if d == 0 || self.is_empty() {
            return;
        }
        let mut idx = vec![0usize; d];
        let mut point: Vec<f64> = self.axes.iter().map(|a| a[0]).collect();
        loop {
            let w: f64 = (0..d).map(|i| self.weights[i][idx[i]]).product();
            visit(&point, w);
            let mut axis = d;
            loop {
                if axis == 0 {
                    return;
                }
                axis -= 1;
                idx[axis] += 1;
                if idx[axis] < self.axes[axis].len() {
                    point[axis] = self.axes[axis][idx[axis]];
                    break;
                }
                idx[axis] = 0;
                point[axis] = self.axes[axis][0];
            }
        }
    }

    /// All nodes flattened, in visiting order.
    pub fn points(&self) -> Vec<Vec<f64>> {
        let mut out = Vec::with_capacity(self.len());
        self.for_each(|x, _| out.push(x.to_vec()));
        out
    }

    pub fn tensor_weights(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.len());
        self.for_each(|_, w| out.push(w));
        out
    }
}

/// `int_D f` by tensor Gauss-Legendre quadrature; zero on a zero-width box.
pub fn integrate<F: FnMut(&[f64]) -> f64>(
    mut f: F,
    domain: &Parallelepiped,
    quad: &QuadratureSpec,
) -> f64 {
    if domain.is_degenerate() {
        return 0.0;
    }
    let mut acc = 0.0;
    quad.gauss_grid(domain).for_each(|x, w| acc += w * f(x));
    acc
}

/// `int_D |f|^p` for finite `p`.
pub fn power_integral<F: FnMut(&[f64]) -> f64>(
    mut f: F,
    domain: &Parallelepiped,
    p: Exponent,
    quad: &QuadratureSpec,
) -> f64 {
    assert!(!p.is_infinite(), "power integral needs a finite exponent");
    integrate(|x| p.power(f(x)), domain, quad)
}

/// `||f||_{p,D}`.
///
/// Finite `p` uses tensor Gauss-Legendre quadrature. `p = inf` takes the max
/// of `|f|` over a tensor Chebyshev-Lobatto grid with endpoints. A zero-width
/// box has measure zero, so finite-`p` norms vanish there.
pub fn lp_norm<F: FnMut(&[f64]) -> f64>(
    mut f: F,
    domain: &Parallelepiped,
    p: Exponent,
    quad: &QuadratureSpec,
) -> f64 {
    if p.is_infinite() {
        let mut best: f64 = 0.0;
        quad.sup_grid(domain).for_each(|x, _| {
            let v = f(x).abs();
            // NaN must propagate; f64::max would drop it
            if v.is_nan() || v > best {
                best = v;
            }
        });
        best
    } else {
        p.root(power_integral(f, domain, p, quad))
    }
}

/// Norm over a possibly empty region; the empty set contributes zero.
pub fn lp_norm_or_zero<F: FnMut(&[f64]) -> f64>(
    f: F,
    domain: Option<&Parallelepiped>,
    p: Exponent,
    quad: &QuadratureSpec,
) -> f64 {
    domain.map_or(0.0, |d| lp_norm(f, d, p, quad))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn graded_panels_resolve_a_cusp() {
        let q = Parallelepiped::new(vec![0.0], vec![1.0]).unwrap();
        let f = |x: &[f64]| (x[0] - 0.3).abs().sqrt();
        let exact = (0.3f64.powf(1.5) + 0.7f64.powf(1.5)) / 1.5;
        let plain = QuadratureSpec::uniform(16, 17).unwrap();
        let graded = plain.graded_toward(vec![vec![0.3]], 1e-6, 8).unwrap();
        let e_plain = (integrate(f, &q, &plain) - exact).abs();
        let e_graded = (integrate(f, &q, &graded) - exact).abs();
        assert!(e_graded < 1e-9, "{e_graded}");
        assert!(e_graded < 1e-3 * e_plain);
        // the cusp itself is on the sup grid
        assert!(graded.sup_grid(&q).axes[0].contains(&0.3));
        assert_relative_eq!(integrate(|x| x[0] * x[0], &q, &graded), 1.0 / 3.0, max_relative = 1e-14);
    }

    #[test]
    fn grading_ignores_points_outside_and_merges_close_ones() {
        let g = Grading {
            points: vec![vec![2.0, 0.5, 0.5 + 1e-9, 0.0]],
            floor: 1e-3,
            panel_nodes: 2,
        };
        let edges = g.panels(0, 0.0, 1.0).unwrap();
        assert_eq!(edges[0], 0.0);
        assert_eq!(*edges.last().unwrap(), 1.0);
        assert!(edges.contains(&0.5));
        assert!(edges.windows(2).all(|w| w[0] < w[1]));
        assert!(g.panels(0, 0.6, 0.9).is_none());
        let plain = QuadratureSpec::default();
        assert!(plain.graded_toward(vec![vec![]], 1e-3, 4).unwrap().grading().is_none());
        assert!(plain.graded_toward(vec![vec![0.5]], 0.0, 4).is_err());
    }

    #[test]
    fn gauss_rule_integrates_polynomials_exactly() {
        for n in [1usize, 2, 5, 16, 32] {
            let rule = GaussLegendre::compute(n);
            for deg in 0..(2 * n) {
                let approx: f64 = rule
                    .nodes
                    .iter()
                    .zip(&rule.weights)
                    .map(|(x, w)| w * x.powi(deg as i32))
                    .sum();
                let exact = if deg % 2 == 1 {
                    0.0
                } else {
                    2.0 / (deg as f64 + 1.0)
                };
                assert!(
                    (approx - exact).abs() <= 1e-12 * exact.abs().max(1.0),
                    "n={n} deg={deg}: {approx} vs {exact}"
                );
            }
        }
    }

    #[test]
    fn unit_constant_on_unit_square() {
        let quad = QuadratureSpec::default();
        let q = Parallelepiped::unit(2);
        assert_relative_eq!(lp_norm(|_| 1.0, &q, Exponent::TWO, &quad), 1.0, epsilon = 1e-14);
        assert_relative_eq!(lp_norm(|_| 1.0, &q, Exponent::INFINITY, &quad), 1.0);
    }

    #[test]
    fn identity_has_l2_norm_one_over_root_three() {
        let quad = QuadratureSpec::default();
        let q = Parallelepiped::unit(1);
        let n = lp_norm(|x| x[0], &q, Exponent::TWO, &quad);
        assert_relative_eq!(n, (1.0f64 / 3.0).sqrt(), epsilon = 1e-14);
    }

    #[test]
    fn sup_norm_finds_endpoint_extremum() {
        let quad = QuadratureSpec::default();
        let q = Parallelepiped::unit(1);
        let n = lp_norm(|x| x[0] - 0.5, &q, Exponent::INFINITY, &quad);
        assert_eq!(n, 0.5);
    }

    #[test]
    fn degenerate_box_has_zero_integral_but_finite_sup() {
        let quad = QuadratureSpec::default();
        let d = Parallelepiped::closed_unchecked(vec![0.0, 0.0], vec![0.0, 1.0]);
        assert_eq!(lp_norm(|_| 3.0, &d, Exponent::ONE, &quad), 0.0);
        assert_eq!(lp_norm(|x| x[1], &d, Exponent::INFINITY, &quad), 1.0);
        assert_eq!(lp_norm_or_zero(|_| 3.0, None, Exponent::INFINITY, &quad), 0.0);
    }

    #[test]
    fn exponent_parsing_and_display() {
        assert!("inf".parse::<Exponent>().unwrap().is_infinite());
        assert_eq!("2".parse::<Exponent>().unwrap(), Exponent::TWO);
        assert!("0.5".parse::<Exponent>().is_err());
        assert_eq!(Exponent::INFINITY.to_string(), "inf");
        assert_eq!(Exponent::new(1.5).unwrap().to_string(), "1.5");
        let v: Vec<Exponent> = serde_json::from_str(r#"[1, 2.5, "inf"]"#).unwrap();
        assert_eq!(v[1].value(), 2.5);
        assert_eq!(serde_json::to_string(&v).unwrap(), r#"[1.0,2.5,"inf"]"#);
    }

    #[test]
    fn lobatto_grid_nests_when_refined() {
        let coarse = chebyshev_lobatto(0.0, 1.0, 17);
        let fine = chebyshev_lobatto(0.0, 1.0, 65);
        for (k, x) in coarse.iter().enumerate() {
            assert!((fine[4 * k] - x).abs() < 1e-15);
        }
    }
}
