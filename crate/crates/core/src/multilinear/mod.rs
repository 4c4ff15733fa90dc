//! Dense small-matrix kernel.
//!
//! Everything here targets the tiny dimensions of the problem (d <= 6 for
//! inputs, up to (d-k)*C(d,k) for lifted tuples), so the algorithms favour
//! unconditional convergence and exactness over asymptotic speed: one-sided
//! Jacobi for singular values, characteristic-polynomial root finding for
//! eigenvalue moduli, and generic field arithmetic so the same code runs on
//! `f64` and on exact rationals.

mod eigen;
mod jacobi;
mod mat;
mod svf;
mod wedge;

pub use eigen::{eigen_moduli, eigenvalues, spectral_radius, EigenModuli};
pub use jacobi::{singular_values, SingularSpectrum};
pub use mat::{Entry, FMat, Mat, QMat};
pub(crate) use svf::log_svf_from_logs;
pub use svf::{chi, log_chi, log_norm_pow, log_svf, svf};
pub use wedge::{
    combinations, combo_rank, exterior_power, graded_inner, hodge_star, wedge_product,
    WedgeBasisIndex,
};
