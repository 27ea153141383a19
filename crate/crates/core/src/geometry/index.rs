use std::fmt;

use serde::{Deserialize, Serialize};

/// A vector of non-negative integers, one entry per coordinate.
///
/// Used for smoothness orders, derivative orders, polynomial degree bounds and
/// step counts of difference stencils.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MultiIndex(Vec<usize>);

impl MultiIndex {
    pub fn new(entries: Vec<usize>) -> Self {
        MultiIndex(entries)
    }

    pub fn zeros(dim: usize) -> Self {
        MultiIndex(vec![0; dim])
    }

    pub fn splat(dim: usize, value: usize) -> Self {
        MultiIndex(vec![value; dim])
    }

    pub fn unit(dim: usize, axis: usize) -> Self {
        let mut v = vec![0; dim];
        v[axis] = 1;
        MultiIndex(v)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn entries(&self) -> &[usize] {
        &self.0
    }

    pub fn get(&self, axis: usize) -> usize {
        self.0[axis]
    }

    /// Sum of the entries.
    pub fn order(&self) -> usize {
        self.0.iter().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&k| k == 0)
    }

    /// True when every entry is at least one.
    pub fn is_positive(&self) -> bool {
        self.0.iter().all(|&k| k >= 1)
    }

    /// Componentwise `self <= other`.
    pub fn le(&self, other: &MultiIndex) -> bool {
        self.dim() == other.dim() && self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    /// Componentwise `self < other`.
    pub fn lt(&self, other: &MultiIndex) -> bool {
        self.dim() == other.dim() && self.0.iter().zip(&other.0).all(|(a, b)| a < b)
    }

    /// Number of multi-indices `k` with `0 <= k < self`.
    pub fn box_volume(&self) -> usize {
        self.0.iter().product()
    }

    /// Decrement one axis; `None` if it is already zero.
    pub fn checked_sub_unit(&self, axis: usize) -> Option<MultiIndex> {
        let mut v = self.0.clone();
        v[axis] = v[axis].checked_sub(1)?;
        Some(MultiIndex(v))
    }

    /// Iterate all `k` with `0 <= k < self` componentwise, last axis fastest.
    pub fn iter_below(&self) -> BoxIter {
        BoxIter::new(self.0.clone())
    }

    /// Iterate all `k` with `0 <= k <= self` componentwise, last axis fastest.
    pub fn iter_upto(&self) -> BoxIter {
        BoxIter::new(self.0.iter().map(|&k| k + 1).collect())
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|k| k.to_string()).collect();
        write!(f, "{}", parts.join("x"))
    }
}

impl From<Vec<usize>> for MultiIndex {
    fn from(v: Vec<usize>) -> Self {
        MultiIndex(v)
    }
}

/// Odometer over a box of integer vectors `0 <= k < extents`.
#[derive(Debug, Clone)]
pub struct BoxIter {
    extents: Vec<usize>,
    current: Vec<usize>,
    done: bool,
}

impl BoxIter {
    pub fn new(extents: Vec<usize>) -> Self {
        let done = extents.iter().any(|&n| n == 0);
        let current = vec![0; extents.len()];
        BoxIter {
            extents,
            current,
            done,
        }
    }
}

impl Iterator for BoxIter {
    type Item = MultiIndex;

    fn next(&mut self) -> Option<MultiIndex> {
        if self.done {
            return None;
        }
        let out = MultiIndex(self.current.clone());
        let mut axis = self.extents.len();
        loop {
            if axis == 0 {
                self.done = true;
                break;
            }
            axis -= 1;
            self.current[axis] += 1;
            if self.current[axis] < self.extents[axis] {
                break;
            }
            self.current[axis] = 0;
        }
        Some(out)
    }
}

/// A subset `e` of the coordinate set `{0, .., d-1}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SubsetMask {
    bits: u32,
    dim: usize,
}

impl SubsetMask {
    pub const MAX_DIM: usize = 16;

    pub fn empty(dim: usize) -> Self {
        assert!(dim <= Self::MAX_DIM, "dimension {dim} exceeds {}", Self::MAX_DIM);
        SubsetMask { bits: 0, dim }
    }

    pub fn full(dim: usize) -> Self {
        assert!(dim <= Self::MAX_DIM, "dimension {dim} exceeds {}", Self::MAX_DIM);
        SubsetMask {
            bits: (1u32 << dim) - 1,
            dim,
        }
    }

    pub fn from_bits(dim: usize, bits: u32) -> Self {
        assert!(dim <= Self::MAX_DIM);
        SubsetMask {
            bits: bits & ((1u32 << dim) - 1),
            dim,
        }
    }

    /// Builds the subset from zero-based axis numbers.
    pub fn from_members(dim: usize, members: &[usize]) -> Self {
        let mut mask = SubsetMask::empty(dim);
        for &i in members {
            assert!(i < dim, "axis {i} out of range for dimension {dim}");
            mask.bits |= 1 << i;
        }
        mask
    }

    pub fn singleton(dim: usize, axis: usize) -> Self {
        SubsetMask::from_members(dim, &[axis])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn is_empty(&self) -> bool {
        self.bits == 0
    }

    pub fn len(&self) -> usize {
        self.bits.count_ones() as usize
    }

    pub fn contains(&self, axis: usize) -> bool {
        axis < self.dim && self.bits & (1 << axis) != 0
    }

    /// The characteristic function of the subset.
    pub fn chi(&self, axis: usize) -> usize {
        usize::from(self.contains(axis))
    }

    pub fn members(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.dim).filter(move |&i| self.contains(i))
    }

    /// `r(e)`: keeps `r_i` for `i` in the subset and zeroes the rest.
    pub fn project(&self, r: &MultiIndex) -> MultiIndex {
        assert_eq!(r.dim(), self.dim, "order and subset dimensions differ");
        MultiIndex(
            (0..self.dim)
                .map(|i| if self.contains(i) { r.get(i) } else { 0 })
                .collect(),
        )
    }

    /// All `2^d` subsets, the empty set first.
    pub fn all(dim: usize) -> impl Iterator<Item = SubsetMask> {
        assert!(dim <= Self::MAX_DIM);
        (0..(1u32 << dim)).map(move |bits| SubsetMask { bits, dim })
    }

    /// All `2^d - 1` non-empty subsets.
    pub fn nonempty(dim: usize) -> impl Iterator<Item = SubsetMask> {
        Self::all(dim).skip(1)
    }
}

impl fmt::Display for SubsetMask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.members().map(|i| (i + 1).to_string()).collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}

/// A real vector used for steps `h`, moduli arguments `t` and box sizes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct StepVector(Vec<f64>);

impl StepVector {
    pub fn new(entries: Vec<f64>) -> Self {
        StepVector(entries)
    }

    pub fn splat(dim: usize, value: f64) -> Self {
        StepVector(vec![value; dim])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn entries(&self) -> &[f64] {
        &self.0
    }

    pub fn get(&self, axis: usize) -> f64 {
        self.0[axis]
    }

    /// `t^r = (t_1^{r_1}, .., t_d^{r_d})`.
    pub fn pow(&self, r: &MultiIndex) -> StepVector {
        assert_eq!(self.dim(), r.dim());
        StepVector(
            self.0
                .iter()
                .zip(r.entries())
                .map(|(&t, &k)| t.powi(k as i32))
                .collect(),
        )
    }

    /// `prod_{i in e} t_i^{r_i}`.
    pub fn subset_weight(&self, r: &MultiIndex, e: SubsetMask) -> f64 {
        e.members().map(|i| self.0[i].powi(r.get(i) as i32)).product()
    }

    pub fn scale(&self, factor: f64) -> StepVector {
        StepVector(self.0.iter().map(|t| t * factor).collect())
    }

    /// Componentwise product `y h`.
    pub fn hadamard(&self, r: &MultiIndex) -> StepVector {
        StepVector(
            self.0
                .iter()
                .zip(r.entries())
                .map(|(&t, &k)| t * k as f64)
                .collect(),
        )
    }

    pub fn le(&self, other: &StepVector) -> bool {
        self.dim() == other.dim() && self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }
}

impl fmt::Display for StepVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|t| t.to_string()).collect();
        write!(f, "{}", parts.join("x"))
    }
}

impl From<Vec<f64>> for StepVector {
    fn from(v: Vec<f64>) -> Self {
        StepVector(v)
    }
}

/// Binomial coefficient `C(n, k)` as a float.
pub fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut acc = 1.0;
    for i in 0..k {
        acc = acc * (n - i) as f64 / (i + 1) as f64;
    }
    acc.round()
}

/// `prod_{i in e} 2^{r_i}` summed over every subset `e`, i.e. `prod_i (1 + 2^{r_i})`.
pub fn whitney_lower_constant(r: &MultiIndex) -> f64 {
    SubsetMask::all(r.dim())
        .map(|e| e.members().map(|i| 2f64.powi(r.get(i) as i32)).product::<f64>())
        .sum()
}
