use std::fmt;

use crate::graph::Topology;
use crate::matrix::DenseMatrix;
use crate::scalar::{sum, Scalar};

/// Outcome of checking a candidate transition matrix against the
/// stochasticity and adjacency constraints.
#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport<T> {
    /// Largest `|Σ_i M[i,j] − 1|` over columns.
    pub max_column_deviation: T,
    pub min_entry: T,
    /// 0-based `(to, from)` pairs with positive probability but no edge.
    pub mask_violations: Vec<(usize, usize)>,
    /// Set when the matrix shape does not match the topology.
    pub shape_mismatch: bool,
}

impl<T: Scalar> ValidationReport<T> {
    pub fn is_valid(&self, tolerance: T) -> bool {
        !self.shape_mismatch
            && self.max_column_deviation <= tolerance
            && self.min_entry >= T::zero()
            && self.mask_violations.is_empty()
    }
}

impl<T: Scalar> fmt::Display for ValidationReport<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "max_column_deviation={} min_entry={}", self.max_column_deviation, self.min_entry)?;
        if self.shape_mismatch {
            write!(f, " shape_mismatch")?;
        }
        for (i, j) in &self.mask_violations {
            write!(f, " mask_violation=({},{})", i + 1, j + 1)?;
        }
        Ok(())
    }
}

pub fn validate_markov<T: Scalar>(matrix: &DenseMatrix<T>, topology: &Topology) -> ValidationReport<T> {
    let m = topology.bins();
    let shape_mismatch = matrix.rows() != m || matrix.cols() != m;
    let mut max_column_deviation = T::zero();
    let mut min_entry = if matrix.rows() * matrix.cols() == 0 { T::zero() } else { matrix[(0, 0)] };
    let mut mask_violations = Vec::new();
    for j in 0..matrix.cols() {
        let column = matrix.column(j);
        max_column_deviation = max_column_deviation.max_of((sum(column) - T::one()).abs());
        for (i, &p) in column.iter().enumerate() {
            min_entry = min_entry.min_of(p);
            let allowed = i < m && j < m && topology.allows(j, i);
            if p > T::zero() && !allowed {
                mask_violations.push((i, j));
            }
        }
    }
    ValidationReport { max_column_deviation, min_entry, mask_violations, shape_mismatch }
}
