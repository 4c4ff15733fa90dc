use super::mat::FMat;
use crate::{Error, Result};

/// Singular values sorted in nonincreasing order.
#[derive(Debug, Clone, PartialEq)]
pub struct SingularSpectrum {
    pub values: Vec<f64>,
}

impl SingularSpectrum {
    /// Smallest singular value.
    pub fn min(&self) -> f64 {
        *self.values.last().unwrap_or(&f64::NAN)
    }

    /// Product of all singular values, i.e. |det|.
    pub fn abs_det(&self) -> f64 {
        self.values.iter().product()
    }
}

const OFF_DIAG_TOL: f64 = 1e-14;
const MAX_SWEEPS: usize = 64;

/// Singular values by one-sided Jacobi iteration on the columns.
///
/// Each rotation orthogonalizes one pair of columns of a working copy of
/// `a`; after convergence the column norms are the singular values. The
/// sweep is unconditionally convergent, which is what we want for the tiny
/// dimensions in play, and needs no external decomposition routine.
pub fn singular_values(a: &FMat) -> Result<SingularSpectrum> {
    if !a.all_finite() {
        return Err(Error::Input("matrix has non-finite entries".into()));
    }
    let d = a.dim();
    if d == 0 {
        return Ok(SingularSpectrum { values: vec![] });
    }
    // Columns of the working matrix.
    let mut cols: Vec<Vec<f64>> = (0..d)
        .map(|j| (0..d).map(|i| a[(i, j)]).collect())
        .collect();

    for _sweep in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..d {
            for q in p + 1..d {
                let mut app = 0.0;
                let mut aqq = 0.0;
                let mut apq = 0.0;
                for i in 0..d {
                    app += cols[p][i] * cols[p][i];
                    aqq += cols[q][i] * cols[q][i];
                    apq += cols[p][i] * cols[q][i];
                }
                if apq.abs() <= OFF_DIAG_TOL * (app * aqq).sqrt() {
                    continue;
                }
                rotated = true;
                let tau = (aqq - app) / (2.0 * apq);
                let t = tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for i in 0..d {
                    let vp = cols[p][i];
                    let vq = cols[q][i];
                    cols[p][i] = c * vp - s * vq;
                    cols[q][i] = s * vp + c * vq;
                }
            }
        }
        if !rotated {
            let mut values: Vec<f64> = cols
                .iter()
                .map(|col| col.iter().map(|x| x * x).sum::<f64>().sqrt())
                .collect();
            values.sort_by(|a, b| b.partial_cmp(a).unwrap());
            return Ok(SingularSpectrum { values });
        }
    }
    Err(Error::Numeric(format!(
        "jacobi sweep did not converge in {MAX_SWEEPS} sweeps (dim {d})"
    )))
}
