//! Numeric checks of the convergence theory for the linear error
//! recursion `e(k+1) = (I − L/d_chsn) e(k)`.

mod eigen;
mod spectral;

pub use eigen::symmetric_eigenvalues;
pub use spectral::{
    contraction_certificate, convergence_rate_bounds, error_update_matrix, linear_error_update, spectral_radius_bound,
    transient_radius_bound, SpectralReport,
};
