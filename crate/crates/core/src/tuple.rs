use crate::multilinear::{exterior_power, FMat, QMat};
use crate::scalar::Rational;
use crate::{Error, Result};
use num_traits::Zero;
use serde::Serialize;

/// Which arithmetic carries the structural decisions for a tuple.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Backend {
    Exact,
    Float,
}

/// An N-tuple of invertible d x d matrices.
///
/// A float view is always present; the exact rational matrices are kept
/// alongside when the input was rational, and structural operations route
/// through them. All matrices are validated invertible on construction
/// (exact zero determinant on the rational backend, singular-value floor
/// on the float backend).
#[derive(Debug, Clone)]
pub struct MatrixTuple {
    dim: usize,
    float: Vec<FMat>,
    exact: Option<Vec<QMat>>,
    labels: Option<Vec<String>>,
}

impl MatrixTuple {
    pub fn from_rational(mats: Vec<QMat>, labels: Option<Vec<String>>) -> Result<Self> {
        Self::validate_count(mats.len(), labels.as_ref())?;
        let dim = mats[0].dim();
        for (i, m) in mats.iter().enumerate() {
            if m.dim() != dim {
                return Err(Error::Input(format!(
                    "matrix {} has dimension {} but the tuple has dimension {dim}",
                    i + 1,
                    m.dim()
                )));
            }
            if m.det().is_zero() {
                return Err(Error::Input(format!(
                    "matrix {} is singular (det = 0)",
                    i + 1
                )));
            }
        }
        let float = mats.iter().map(|m| m.to_float()).collect();
        Ok(MatrixTuple {
            dim,
            float,
            exact: Some(mats),
            labels,
        })
    }

    pub fn from_float(mats: Vec<FMat>, labels: Option<Vec<String>>) -> Result<Self> {
        Self::validate_count(mats.len(), labels.as_ref())?;
        let dim = mats[0].dim();
        for (i, m) in mats.iter().enumerate() {
            if m.dim() != dim {
                return Err(Error::Input(format!(
                    "matrix {} has dimension {} but the tuple has dimension {dim}",
                    i + 1,
                    m.dim()
                )));
            }
            if !m.all_finite() {
                return Err(Error::Input(format!(
                    "matrix {} has non-finite entries",
                    i + 1
                )));
            }
            let spec = crate::multilinear::singular_values(m)?;
            if spec.min() <= 1e-12 * spec.values[0].max(1.0) {
                return Err(Error::Input(format!(
                    "matrix {} is numerically singular (smallest singular value {:.3e})",
                    i + 1,
                    spec.min()
                )));
            }
        }
        Ok(MatrixTuple {
            dim,
            float: mats,
            exact: None,
            labels,
        })
    }

    fn validate_count(n: usize, labels: Option<&Vec<String>>) -> Result<()> {
        if n < 2 {
            return Err(Error::Input(format!(
                "a tuple needs at least 2 matrices, got {n}"
            )));
        }
        if let Some(l) = labels {
            if l.len() != n {
                return Err(Error::Input(format!("{} labels for {n} matrices", l.len())));
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn count(&self) -> usize {
        self.float.len()
    }

    pub fn backend(&self) -> Backend {
        if self.exact.is_some() {
            Backend::Exact
        } else {
            Backend::Float
        }
    }

    pub fn float_mats(&self) -> &[FMat] {
        &self.float
    }

    pub fn exact_mats(&self) -> Option<&[QMat]> {
        self.exact.as_deref()
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    /// Tuple of k-th exterior powers, carrying the backend along.
    pub fn wedge(&self, k: usize) -> Result<MatrixTuple> {
        let float: Result<Vec<FMat>> = self.float.iter().map(|m| exterior_power(m, k)).collect();
        let float = float?;
        let exact = match &self.exact {
            Some(mats) => {
                let e: Result<Vec<QMat>> = mats.iter().map(|m| exterior_power(m, k)).collect();
                Some(e?)
            }
            None => None,
        };
        let dim = float[0].dim();
        Ok(MatrixTuple {
            dim,
            float,
            exact,
            labels: None,
        })
    }

    /// Remove one matrix (0-based); requires at least 3 so that the result
    /// is still a tuple.
    pub fn without(&self, index: usize) -> Result<MatrixTuple> {
        if self.count() < 3 {
            return Err(Error::Input(
                "removing a matrix from a 2-tuple leaves no valid tuple".into(),
            ));
        }
        if index >= self.count() {
            return Err(Error::Input(format!(
                "remove index {} out of range for {} matrices",
                index + 1,
                self.count()
            )));
        }
        let keep = |v: &mut Vec<_>| {
            v.remove(index);
        };
        let mut float = self.float.clone();
        keep(&mut float);
        let exact = self.exact.clone().map(|mut e| {
            e.remove(index);
            e
        });
        let labels = self.labels.clone().map(|mut l| {
            l.remove(index);
            l
        });
        Ok(MatrixTuple {
            dim: self.dim,
            float,
            exact,
            labels,
        })
    }

    /// Rescale every matrix by a positive float factor (float backend view;
    /// exact matrices are dropped unless the factor is rational-exact 1).
    pub fn scaled(&self, factor: f64) -> Result<MatrixTuple> {
        if !(factor.is_finite() && factor > 0.0) {
            return Err(Error::Input(
                "scale factor must be positive and finite".into(),
            ));
        }
        let float: Vec<FMat> = self.float.iter().map(|m| m.scale(&factor)).collect();
        MatrixTuple::from_float(float, self.labels.clone())
    }

    /// Rescale exactly by a rational factor, keeping the exact backend.
    pub fn scaled_rational(&self, factor: &Rational) -> Result<MatrixTuple> {
        if factor.is_zero() {
            return Err(Error::Input("scale factor must be nonzero".into()));
        }
        match &self.exact {
            Some(mats) => {
                let scaled: Vec<QMat> = mats.iter().map(|m| m.scale(factor)).collect();
                MatrixTuple::from_rational(scaled, self.labels.clone())
            }
            None => Err(Error::Input("tuple has no exact backend to scale".into())),
        }
    }

    /// True when all matrices have operator norm strictly below 1.
    pub fn is_contractive(&self) -> Result<bool> {
        for m in &self.float {
            let spec = crate::multilinear::singular_values(m)?;
            if spec.values[0] >= 1.0 {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// True when every matrix is diagonal (exactly on the rational backend,
    /// to 1e-12 relative on floats).
    pub fn is_diagonal(&self) -> bool {
        match &self.exact {
            Some(mats) => mats
                .iter()
                .all(|m| (0..m.dim()).all(|i| (0..m.dim()).all(|j| i == j || m[(i, j)].is_zero()))),
            None => self.float.iter().all(|m| {
                let scale = m.max_abs().max(1.0);
                (0..m.dim())
                    .all(|i| (0..m.dim()).all(|j| i == j || m[(i, j)].abs() <= 1e-12 * scale))
            }),
        }
    }
}
