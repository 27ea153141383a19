use std::fmt;

use serde::{Deserialize, Serialize};

use super::index::{MultiIndex, StepVector, SubsetMask};
use super::GeometryError;

/// A coordinate box `[a_1, b_1] x .. x [a_d, b_d]`.
///
/// Boxes built through [`Parallelepiped::new`] have `a_i < b_i`. Shifted
/// domains may collapse to zero width on some axis; such boxes are still
/// represented (they carry no volume but are not empty as point sets).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Parallelepiped {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl Parallelepiped {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self, GeometryError> {
        if lower.is_empty() {
            return Err(GeometryError::ZeroDimension);
        }
        if lower.len() != upper.len() {
            return Err(GeometryError::DimensionMismatch {
                expected: lower.len(),
                found: upper.len(),
            });
        }
        for (axis, (&a, &b)) in lower.iter().zip(&upper).enumerate() {
            if !(a.is_finite() && b.is_finite() && a < b) {
                return Err(GeometryError::InvalidInterval {
                    axis,
                    lower: a,
                    upper: b,
                });
            }
        }
        Ok(Parallelepiped { lower, upper })
    }

    /// Box whose intervals may have zero width.
    pub(crate) fn closed_unchecked(lower: Vec<f64>, upper: Vec<f64>) -> Self {
        debug_assert!(lower.iter().zip(&upper).all(|(a, b)| a <= b));
        Parallelepiped { lower, upper }
    }

    pub fn unit(dim: usize) -> Self {
        Parallelepiped {
            lower: vec![0.0; dim],
            upper: vec![1.0; dim],
        }
    }

    pub fn cube(dim: usize, a: f64, b: f64) -> Result<Self, GeometryError> {
        Parallelepiped::new(vec![a; dim], vec![b; dim])
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    /// `delta(Q) = (b_1 - a_1, .., b_d - a_d)`.
    pub fn size(&self) -> StepVector {
        StepVector::new(
            self.lower
                .iter()
                .zip(&self.upper)
                .map(|(a, b)| b - a)
                .collect(),
        )
    }

    pub fn volume(&self) -> f64 {
        self.size().entries().iter().product()
    }

    pub fn is_degenerate(&self) -> bool {
        self.lower.iter().zip(&self.upper).any(|(a, b)| a >= b)
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dim()
            && x.iter()
                .zip(self.lower.iter().zip(&self.upper))
                .all(|(v, (a, b))| *a <= *v && *v <= *b)
    }

    pub fn contains_box(&self, other: &Parallelepiped) -> bool {
        self.dim() == other.dim()
            && (0..self.dim())
                .all(|i| self.lower[i] <= other.lower[i] && other.upper[i] <= self.upper[i])
    }

    pub fn center(&self) -> Vec<f64> {
        self.lower
            .iter()
            .zip(&self.upper)
            .map(|(a, b)| 0.5 * (a + b))
            .collect()
    }

    /// Box sharing the lower corner with side lengths scaled by `factor`.
    pub fn shrink_from_lower(&self, factor: f64) -> Parallelepiped {
        assert!(factor > 0.0);
        let upper = self
            .lower
            .iter()
            .zip(&self.upper)
            .map(|(a, b)| a + (b - a) * factor)
            .collect();
        Parallelepiped {
            lower: self.lower.clone(),
            upper,
        }
    }

    /// Maps `y` in the unit cube to `a + delta * y`.
    pub fn from_unit(&self, y: &[f64]) -> Vec<f64> {
        (0..self.dim())
            .map(|i| self.lower[i] + (self.upper[i] - self.lower[i]) * y[i])
            .collect()
    }

    /// Quarter points `c_i = a_i + delta_i / 4` and `d_i = b_i - delta_i / 4`.
    pub fn quarter_points(&self) -> (Vec<f64>, Vec<f64>) {
        let c = (0..self.dim())
            .map(|i| self.lower[i] + 0.25 * (self.upper[i] - self.lower[i]))
            .collect();
        let d = (0..self.dim())
            .map(|i| self.upper[i] - 0.25 * (self.upper[i] - self.lower[i]))
            .collect();
        (c, d)
    }

    /// The overlapping sub-box `Q_e`: axis `i` spans `[a_i, d_i]` when `i` is in
    /// `e` and `[c_i, b_i]` otherwise.
    pub fn subdomain(&self, e: SubsetMask) -> Parallelepiped {
        assert_eq!(e.dim(), self.dim());
        let (c, d) = self.quarter_points();
        let mut lower = self.lower.clone();
        let mut upper = self.upper.clone();
        for i in 0..self.dim() {
            if e.contains(i) {
                upper[i] = d[i];
            } else {
                lower[i] = c[i];
            }
        }
        Parallelepiped { lower, upper }
    }

    /// All `2^d` sub-boxes `Q_e`, in subset enumeration order.
    pub fn subdomains(&self) -> Vec<(SubsetMask, Parallelepiped)> {
        SubsetMask::all(self.dim())
            .map(|e| (e, self.subdomain(e)))
            .collect()
    }
}

impl fmt::Display for Parallelepiped {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .lower
            .iter()
            .zip(&self.upper)
            .map(|(a, b)| format!("{a}:{b}"))
            .collect();
        write!(f, "{}", parts.join("x"))
    }
}

/// `Q_y = {x in Q : x_i, x_i + y_i in [a_i, b_i]}`.
///
/// Returns `None` when the set is empty. An axis that collapses to a single
/// point yields a zero-width box, which still supports sup-norms.
pub fn shifted_domain(q: &Parallelepiped, y: &StepVector) -> Option<Parallelepiped> {
    assert_eq!(q.dim(), y.dim(), "shift and box dimensions differ");
    let mut lower = Vec::with_capacity(q.dim());
    let mut upper = Vec::with_capacity(q.dim());
    for i in 0..q.dim() {
        let (a, b) = (q.lower[i], q.upper[i]);
        let s = y.get(i);
        let lo = if s >= 0.0 { a } else { a - s };
        let mut hi = if s >= 0.0 { b - s } else { b };
        if hi < lo {
            // absorb rounding from computing b - s when s is exactly the width
            let slack = 4.0 * f64::EPSILON * (b - a).abs().max(a.abs()).max(b.abs());
            if lo - hi > slack {
                return None;
            }
            hi = lo;
        }
        lower.push(lo);
        upper.push(hi);
    }
    Some(Parallelepiped::closed_unchecked(lower, upper))
}

/// `Q_{r h}` for a difference of order `r` and step `h`.
pub fn difference_domain(
    q: &Parallelepiped,
    r: &MultiIndex,
    h: &StepVector,
) -> Option<Parallelepiped> {
    shifted_domain(q, &h.hadamard(r))
}
