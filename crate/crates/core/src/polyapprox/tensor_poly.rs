use std::fmt;

use crate::functions::Evaluate;
use crate::geometry::{binomial, MultiIndex, Parallelepiped};

use super::ApproxError;

/// The univariate factor basis of a [`TensorPolynomial`].
#[derive(Debug, Clone, PartialEq)]
pub enum Basis {
    /// `prod_i (x_i - c_i)^{m_i}`.
    MonomialShifted { center: Vec<f64> },
    /// `prod_i P_{m_i}(s_i(x_i))` with `s_i` mapping `[a_i, b_i]` onto `[-1, 1]`.
    LegendreShifted { domain: Parallelepiped },
}

impl Basis {
    pub fn dim(&self) -> usize {
        match self {
            Basis::MonomialShifted { center } => center.len(),
            Basis::LegendreShifted { domain } => domain.dim(),
        }
    }

    /// Values of the first `n` basis functions on `axis` at `x`.
    fn axis_values(&self, axis: usize, n: usize, x: f64, out: &mut Vec<f64>) {
        out.clear();
        match self {
            Basis::MonomialShifted { center } => {
                let u = x - center[axis];
                let mut v = 1.0;
                for _ in 0..n {
                    out.push(v);
                    v *= u;
                }
            }
            Basis::LegendreShifted { domain } => {
                let (a, b) = (domain.lower()[axis], domain.upper()[axis]);
                let s = 2.0 * (x - a) / (b - a) - 1.0;
                legendre_values(s, n, out);
            }
        }
    }
}

/// `P_0(s), .., P_{n-1}(s)` by the three-term recurrence.
pub(crate) fn legendre_values(s: f64, n: usize, out: &mut Vec<f64>) {
    out.clear();
    if n == 0 {
        return;
    }
    out.push(1.0);
    if n == 1 {
        return;
    }
    out.push(s);
    for m in 1..n - 1 {
        let next = ((2 * m + 1) as f64 * s * out[m] - m as f64 * out[m - 1]) / (m + 1) as f64;
        out.push(next);
    }
}

/// An element of `P_r`: coordinate degree at most `r_i - 1` on axis `i`.
///
/// Coefficients are stored densely with the last axis fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct TensorPolynomial {
    degrees: MultiIndex,
    coeffs: Vec<f64>,
    basis: Basis,
}

impl TensorPolynomial {
    pub fn new(degrees: MultiIndex, coeffs: Vec<f64>, basis: Basis) -> Result<Self, ApproxError> {
        if degrees.dim() != basis.dim() {
            return Err(ApproxError::DimensionMismatch {
                expected: basis.dim(),
                found: degrees.dim(),
            });
        }
        if !degrees.is_positive() {
            return Err(ApproxError::OrderNotPositive(degrees));
        }
        if coeffs.len() != degrees.box_volume() {
            return Err(ApproxError::CoefficientCount {
                expected: degrees.box_volume(),
                found: coeffs.len(),
            });
        }
        Ok(TensorPolynomial {
            degrees,
            coeffs,
            basis,
        })
    }

    pub fn zero(degrees: MultiIndex, basis: Basis) -> Result<Self, ApproxError> {
        let n = degrees.box_volume();
        TensorPolynomial::new(degrees, vec![0.0; n], basis)
    }

    pub fn degrees(&self) -> &MultiIndex {
        &self.degrees
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn basis(&self) -> &Basis {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.degrees.dim()
    }

    /// Tensor contraction of the per-axis basis values at `x`.
    pub fn evaluate(&self, x: &[f64]) -> f64 {
        let d = self.dim();
        if let Basis::LegendreShifted { domain } = &self.basis {
            if !domain.contains(x) {
                log::trace!("evaluating polynomial outside its reference box");
            }
        }
        let mut vals: Vec<Vec<f64>> = Vec::with_capacity(d);
        let mut buf = Vec::new();
        for i in 0..d {
            self.basis.axis_values(i, self.degrees.get(i), x[i], &mut buf);
            vals.push(buf.clone());
        }
        contract(&self.coeffs, self.degrees.entries(), &vals)
    }

    /// The same polynomial in the monomial basis centred at `center`.
    pub fn to_monomial(&self, center: &[f64]) -> TensorPolynomial {
        assert_eq!(center.len(), self.dim());
        let mats: Vec<Vec<Vec<f64>>> = (0..self.dim())
            .map(|i| {
                let n = self.degrees.get(i);
                match &self.basis {
                    Basis::MonomialShifted { center: c0 } => {
                        monomial_shift_matrix(n, center[i] - c0[i])
                    }
                    Basis::LegendreShifted { domain } => legendre_to_monomial_matrix(
                        n,
                        domain.lower()[i],
                        domain.upper()[i],
                        center[i],
                    ),
                }
            })
            .collect();
        TensorPolynomial {
            degrees: self.degrees.clone(),
            coeffs: apply_axis_maps(&self.coeffs, self.degrees.entries(), &mats),
            basis: Basis::MonomialShifted {
                center: center.to_vec(),
            },
        }
    }

    /// The same polynomial in the Legendre basis of `domain`.
    pub fn to_legendre(&self, domain: &Parallelepiped) -> TensorPolynomial {
        assert_eq!(domain.dim(), self.dim());
        let center = domain.center();
        let mono = self.to_monomial(&center);
        let mut coeffs = mono.coeffs;
        let dims = self.degrees.entries().to_vec();
        for (i, &n) in dims.iter().enumerate() {
            let l2m =
                legendre_to_monomial_matrix(n, domain.lower()[i], domain.upper()[i], center[i]);
            coeffs = map_axis(&coeffs, &dims, i, |input, output| {
                // solve sum_m c_m L2M[m][k] = input[k]; L2M is lower triangular in (m, k)
                for m in (0..n).rev() {
                    let mut acc = input[m];
                    for (j, out) in output.iter().enumerate().take(n).skip(m + 1) {
                        acc -= out * l2m[j][m];
                    }
                    output[m] = acc / l2m[m][m];
                }
            });
        }
        TensorPolynomial {
            degrees: self.degrees.clone(),
            coeffs,
            basis: Basis::LegendreShifted {
                domain: domain.clone(),
            },
        }
    }
}

impl Evaluate for TensorPolynomial {
    fn dim(&self) -> usize {
        self.degrees.dim()
    }

    fn eval(&self, x: &[f64]) -> f64 {
        self.evaluate(x)
    }
}

impl fmt::Display for TensorPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match &self.basis {
            Basis::MonomialShifted { .. } => "monomial",
            Basis::LegendreShifted { .. } => "legendre",
        };
        write!(f, "P_{} ({kind}, {} coefficients)", self.degrees, self.coeffs.len())
    }
}

/// `sum_alpha c_alpha prod_i vals[i][alpha_i]`, last axis fastest.
pub(crate) fn contract(coeffs: &[f64], dims: &[usize], vals: &[Vec<f64>]) -> f64 {
    // fold the last axis first, then move outward
    let mut current = coeffs.to_vec();
    for axis in (0..dims.len()).rev() {
        let n = dims[axis];
        let v = &vals[axis];
        let outer = current.len() / n;
        let mut next = Vec::with_capacity(outer);
        for chunk in current.chunks(n) {
            next.push(chunk.iter().zip(v).map(|(c, b)| c * b).sum());
        }
        current = next;
    }
    current[0]
}

/// Rewrites `sum_m c_m (x - c0)^m` around a new centre: `(u + s)^m` expanded.
fn monomial_shift_matrix(n: usize, shift: f64) -> Vec<Vec<f64>> {
    // new centre c = c0 + shift, so x - c0 = (x - c) + shift
    (0..n)
        .map(|m| {
            (0..n)
                .map(|k| {
                    if k > m {
                        0.0
                    } else {
                        binomial(m, k) * shift.powi((m - k) as i32)
                    }
                })
                .collect()
        })
        .collect()
}

/// `L2M[m][k]`: coefficient of `(x - c)^k` in the shifted Legendre `P_m` on `[a, b]`.
fn legendre_to_monomial_matrix(n: usize, a: f64, b: f64, c: f64) -> Vec<Vec<f64>> {
    let alpha = 2.0 / (b - a);
    let beta = 2.0 * (c - a) / (b - a) - 1.0;
    let mut rows: Vec<Vec<f64>> = Vec::with_capacity(n);
    for m in 0..n {
        let mut row = vec![0.0; n];
        match m {
            0 => row[0] = 1.0,
            1 => {
                row[0] = beta;
                if n > 1 {
                    row[1] = alpha;
                }
            }
            _ => {
                // P_m = ((2m-1) s P_{m-1} - (m-1) P_{m-2}) / m with s = beta + alpha u
                let (p1, p0) = (&rows[m - 1], &rows[m - 2]);
                let k2 = (2 * m - 1) as f64;
                let k0 = (m - 1) as f64;
                for k in 0..n {
                    let mut v = k2 * beta * p1[k] - k0 * p0[k];
                    if k >= 1 {
                        v += k2 * alpha * p1[k - 1];
                    }
                    row[k] = v / m as f64;
                }
            }
        }
        rows.push(row);
    }
    rows
}

/// Applies `out[k] = sum_m in[m] mat[m][k]` along every axis.
fn apply_axis_maps(coeffs: &[f64], dims: &[usize], mats: &[Vec<Vec<f64>>]) -> Vec<f64> {
    let mut current = coeffs.to_vec();
    for (axis, mat) in mats.iter().enumerate() {
        let n = dims[axis];
        current = map_axis(&current, dims, axis, |input, output| {
            for k in 0..n {
                output[k] = (0..n).map(|m| input[m] * mat[m][k]).sum();
            }
        });
    }
    current
}

/// Applies a linear map to every fibre along `axis`.
fn map_axis<F: FnMut(&[f64], &mut [f64])>(
    coeffs: &[f64],
    dims: &[usize],
    axis: usize,
    mut f: F,
) -> Vec<f64> {
    let n = dims[axis];
    let inner: usize = dims[axis + 1..].iter().product();
    let outer: usize = dims[..axis].iter().product();
    let mut out = vec![0.0; coeffs.len()];
    let mut fibre = vec![0.0; n];
    let mut mapped = vec![0.0; n];
    for o in 0..outer {
        for i in 0..inner {
            for (m, slot) in fibre.iter_mut().enumerate() {
                *slot = coeffs[(o * n + m) * inner + i];
            }
            mapped.iter_mut().for_each(|v| *v = 0.0);
            f(&fibre, &mut mapped);
            for (m, v) in mapped.iter().enumerate() {
                out[(o * n + m) * inner + i] = *v;
            }
        }
    }
    out
}
