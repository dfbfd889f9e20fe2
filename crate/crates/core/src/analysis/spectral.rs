use super::symmetric_eigenvalues;
use crate::density::ErrorVector;
use crate::error::{Error, Result};
use crate::graph::LaplacianView;
use crate::matrix::DenseMatrix;
use crate::scalar::RealScalar;
use crate::synthesis::TransientBlocks;

/// Numeric certificate that the linear error recursion contracts.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralReport<T> {
    pub bins: usize,
    pub max_degree: usize,
    pub d_chsn: T,
    /// Eigenvalues of the Laplacian, ascending.
    pub laplacian_eigs: Vec<T>,
    /// Spectral radius of `F − 11ᵀ/m` with `F = I − L/d_chsn`.
    pub zero_sum_radius: T,
    /// Smallest eigenvalue of `I − GᵀG`, `G = F − 11ᵀ/m`.
    pub lyapunov_min_eig: T,
    pub rate_lower: T,
    pub rate_upper: T,
}

impl<T: RealScalar> SpectralReport<T> {
    /// Every certificate that does not hold, as a readable reason.
    pub fn violations(&self) -> Vec<String> {
        let tol = T::tolerance();
        let mut out = Vec::new();
        if let Some(&first) = self.laplacian_eigs.first() {
            if first.abs() > tol {
                out.push(format!("smallest Laplacian eigenvalue {first} is not zero"));
            }
        }
        let bound = T::from_count(2 * self.max_degree);
        if let Some(&last) = self.laplacian_eigs.last() {
            if last > bound + tol {
                out.push(format!("largest Laplacian eigenvalue {last} exceeds 2*max_degree = {bound}"));
            }
        }
        if self.zero_sum_radius >= T::one() {
            out.push(format!("zero-sum radius {} is not below 1 (graph disconnected?)", self.zero_sum_radius));
        }
        if self.lyapunov_min_eig <= tol {
            out.push(format!("I - G^T G is not positive definite (min eigenvalue {})", self.lyapunov_min_eig));
        }
        if self.rate_lower < -tol || self.rate_lower > self.rate_upper + tol || self.rate_upper > T::one() + tol {
            out.push(format!("rate bounds ({}, {}) are not ordered inside [0, 1]", self.rate_lower, self.rate_upper));
        }
        out
    }

    pub fn is_certified(&self) -> bool {
        self.violations().is_empty()
    }

    /// `key=value` pairs in a fixed order.
    pub fn key_values(&self) -> Vec<(&'static str, String)> {
        let eigs: Vec<String> = self.laplacian_eigs.iter().map(|e| e.to_string()).collect();
        vec![
            ("bins", self.bins.to_string()),
            ("max_degree", self.max_degree.to_string()),
            ("d_chsn", self.d_chsn.to_string()),
            ("laplacian_min_eig", self.laplacian_eigs.first().map_or(String::new(), |e| e.to_string())),
            ("laplacian_max_eig", self.laplacian_eigs.last().map_or(String::new(), |e| e.to_string())),
            ("laplacian_eigs", eigs.join(";")),
            ("zero_sum_radius", self.zero_sum_radius.to_string()),
            ("lyapunov_min_eig", self.lyapunov_min_eig.to_string()),
            ("rate_lower", self.rate_lower.to_string()),
            ("rate_upper", self.rate_upper.to_string()),
            ("certified", self.is_certified().to_string()),
        ]
    }
}

fn check_divisor<T: RealScalar>(view: &LaplacianView<T>, d_chsn: T) -> Result<()> {
    if d_chsn <= T::from_count(view.max_degree) {
        return Err(Error::InadmissibleDivisor { d_chsn: d_chsn.to_f64_lossy(), max_degree: view.max_degree });
    }
    Ok(())
}

/// `F = I − L / d_chsn`.
pub fn error_update_matrix<T: RealScalar>(view: &LaplacianView<T>, d_chsn: T) -> DenseMatrix<T> {
    let n = view.len();
    DenseMatrix::identity(n).sub(&view.laplacian.scale(T::one() / d_chsn)).expect("square shapes agree")
}

fn mean_projector<T: RealScalar>(n: usize) -> DenseMatrix<T> {
    let w = T::one() / T::from_count(n);
    DenseMatrix::from_fn(n, n, |_, _| w)
}

/// One step of the idealized error recursion `e ← (I − L/d_chsn) e`.
pub fn linear_error_update<T: RealScalar>(
    e: &ErrorVector<T>,
    view: &LaplacianView<T>,
    d_chsn: T,
) -> Result<ErrorVector<T>> {
    if e.len() != view.len() {
        return Err(Error::LengthMismatch { expected: view.len(), found: e.len() });
    }
    let total = e.sum();
    if total.abs() > T::tolerance() {
        return Err(Error::NotZeroSum(total.to_f64_lossy()));
    }
    check_divisor(view, d_chsn)?;
    let flow = view.laplacian.mul_vec(e.as_slice())?;
    Ok(ErrorVector(e.as_slice().iter().zip(flow).map(|(&ei, li)| ei - li / d_chsn).collect()))
}

/// `(λ_min(S + 11ᵀ/m), λ_max(S))` with `S = (2·d_chsn·L − L²) / d_chsn²`;
/// these bracket the per-step relative decrease of `‖e‖²`.
pub fn convergence_rate_bounds<T: RealScalar>(view: &LaplacianView<T>, d_chsn: T) -> Result<(T, T)> {
    check_divisor(view, d_chsn)?;
    let l = &view.laplacian;
    let two = T::one() + T::one();
    let s = l.scale(two * d_chsn).sub(&l.mul(l)?)?.scale(T::one() / (d_chsn * d_chsn));
    let shifted = s.add(&mean_projector(view.len()))?;
    let lower = *symmetric_eigenvalues(&shifted)?.first().expect("non-empty");
    let upper = *symmetric_eigenvalues(&s)?.last().expect("non-empty");
    Ok((lower, upper))
}

/// Spectral certificate for a Laplacian view and divisor.
///
/// Connectivity is not required: for a disconnected graph the zero-sum
/// radius reaches one and the report lists the violation.
pub fn contraction_certificate<T: RealScalar>(view: &LaplacianView<T>, d_chsn: T) -> Result<SpectralReport<T>> {
    if view.is_empty() {
        return Err(Error::EmptySubset);
    }
    check_divisor(view, d_chsn)?;
    let n = view.len();
    let laplacian_eigs = symmetric_eigenvalues(&view.laplacian)?;
    let g = error_update_matrix(view, d_chsn).sub(&mean_projector(n))?;
    let g_eigs = symmetric_eigenvalues(&g)?;
    let zero_sum_radius = g_eigs.iter().fold(T::zero(), |acc, e| acc.max_of(e.abs()));
    let lyapunov = DenseMatrix::identity(n).sub(&g.transpose().mul(&g)?)?;
    let lyapunov_min_eig = symmetric_eigenvalues(&lyapunov)?[0];
    let (rate_lower, rate_upper) = convergence_rate_bounds(view, d_chsn)?;
    Ok(SpectralReport {
        bins: n,
        max_degree: view.max_degree,
        d_chsn,
        laplacian_eigs,
        zero_sum_radius,
        lyapunov_min_eig,
        rate_lower,
        rate_upper,
    })
}

/// Upper bound on the spectral radius of a square matrix:
/// `‖A^k‖₁^{1/k}` for `k = 1..=max_power`, minimized over `k`.
pub fn spectral_radius_bound<T: RealScalar>(matrix: &DenseMatrix<T>, max_power: usize) -> Result<T> {
    if !matrix.is_square() {
        return Err(Error::InvalidMatrix("spectral radius of a non-square matrix".into()));
    }
    if matrix.rows() == 0 {
        return Ok(T::zero());
    }
    let mut power = matrix.clone();
    let mut best = power.norm_one();
    for k in 2..=max_power.max(1) {
        power = power.mul(matrix)?;
        let norm = power.norm_one();
        let root = if norm == T::zero() { T::zero() } else { norm.powf(T::one() / T::from_count(k)) };
        best = best.min_of(root);
        if best == T::zero() {
            break;
        }
    }
    Ok(best)
}

/// Bound on `ρ(M1)` for the transient block; below one means transient
/// mass drains into the recurrent set.
pub fn transient_radius_bound<T: RealScalar>(blocks: &TransientBlocks<T>) -> Result<T> {
    spectral_radius_bound(&blocks.m1, blocks.m1.rows())
}
