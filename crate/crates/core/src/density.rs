//! Probability vectors over bins and the distances between them.

use std::ops::Index;

use crate::engine::SwarmState;
use crate::error::{Error, Result};
use crate::scalar::{sum, Scalar};

/// Non-negative vector summing to one (within [`Scalar::tolerance`]).
#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilityVector<T>(Vec<T>);

impl<T: Scalar> ProbabilityVector<T> {
    pub fn new(values: Vec<T>) -> Result<Self> {
        if let Some(index) = values.iter().position(|&v| v < T::zero()) {
            return Err(Error::NegativeEntry { index });
        }
        let total = sum(&values);
        if (total - T::one()).abs() > T::tolerance() {
            return Err(Error::NotNormalized { sum: total.to_f64_lossy() });
        }
        Ok(Self(values))
    }

    /// Uniform distribution over `m` bins.
    pub fn uniform(m: usize) -> Self {
        let p = T::one() / T::from_count(m);
        Self(vec![p; m])
    }

    /// Point mass on `bin`.
    pub fn point(m: usize, bin: usize) -> Self {
        let mut values = vec![T::zero(); m];
        values[bin] = T::one();
        Self(values)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[T] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<T> {
        self.0
    }

    /// Entries at the given bins, in order.
    pub fn restrict(&self, bins: &[usize]) -> Vec<T> {
        bins.iter().map(|&b| self.0[b]).collect()
    }

    /// Wraps a vector produced by a mass-preserving operation.
    pub(crate) fn from_trusted(values: Vec<T>) -> Self {
        Self(values)
    }
}

impl<T> Index<usize> for ProbabilityVector<T> {
    type Output = T;

    fn index(&self, i: usize) -> &T {
        &self.0[i]
    }
}

/// Signed per-bin deficit `desired − current`.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorVector<T>(pub Vec<T>);

impl<T: Scalar> ErrorVector<T> {
    pub fn as_slice(&self) -> &[T] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn sum(&self) -> T {
        sum(&self.0)
    }

    pub fn norm_squared(&self) -> T {
        self.0.iter().fold(T::zero(), |acc, &e| acc + e * e)
    }
}

/// Componentwise `desired − current`.
pub fn error_vector<T: Scalar>(
    desired: &ProbabilityVector<T>,
    current: &ProbabilityVector<T>,
) -> Result<ErrorVector<T>> {
    error_from_slices(desired.as_slice(), current.as_slice())
}

pub(crate) fn error_from_slices<T: Scalar>(desired: &[T], current: &[T]) -> Result<ErrorVector<T>> {
    if desired.len() != current.len() {
        return Err(Error::LengthMismatch { expected: desired.len(), found: current.len() });
    }
    Ok(ErrorVector(desired.iter().zip(current).map(|(&v, &x)| v - x).collect()))
}

/// Half the L1 distance; lies in `[0, 1]` for probability vectors.
pub fn total_variation<T: Scalar>(a: &ProbabilityVector<T>, b: &ProbabilityVector<T>) -> Result<T> {
    total_variation_slices(a.as_slice(), b.as_slice())
}

pub(crate) fn total_variation_slices<T: Scalar>(a: &[T], b: &[T]) -> Result<T> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch { expected: a.len(), found: b.len() });
    }
    let l1 = a.iter().zip(b).fold(T::zero(), |acc, (&x, &y)| acc + (x - y).abs());
    Ok(l1 / (T::one() + T::one()))
}

/// Row-major flattening of a non-negative grid, normalized to sum one.
pub fn from_weight_map<T: Scalar>(weights: &[Vec<T>]) -> Result<ProbabilityVector<T>> {
    let cols = weights.first().map_or(0, Vec::len);
    let mut flat = Vec::with_capacity(weights.len() * cols);
    for row in weights {
        if row.len() != cols {
            return Err(Error::LengthMismatch { expected: cols, found: row.len() });
        }
        flat.extend_from_slice(row);
    }
    if let Some(index) = flat.iter().position(|&w| w < T::zero()) {
        return Err(Error::NegativeEntry { index });
    }
    let total = sum(&flat);
    if total <= T::zero() {
        return Err(Error::ZeroWeights);
    }
    Ok(ProbabilityVector(flat.into_iter().map(|w| w / total).collect()))
}

/// Fraction of agents in each of `m` bins.
pub fn empirical_density<T: Scalar>(swarm: &SwarmState, m: usize) -> Result<ProbabilityVector<T>> {
    let counts = swarm.counts(m)?;
    let n = swarm.len();
    if n == 0 {
        return Err(Error::EmptySwarm);
    }
    let total = T::from_count(n);
    Ok(ProbabilityVector(counts.into_iter().map(|c| T::from_count(c) / total).collect()))
}
