use super::mat::FMat;
use crate::{Error, Result};
use num_complex::Complex64;

/// Moduli of the complex eigenvalues, sorted nonincreasing, with multiplicity.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenModuli {
    pub values: Vec<f64>,
    /// Always float precision: eigenvalue moduli are irrational in general,
    /// so the exact backend routes through this as well.
    pub float_precision: bool,
}

impl EigenModuli {
    pub fn spectral_radius(&self) -> f64 {
        *self.values.first().unwrap_or(&0.0)
    }
}

/// Coefficients of the characteristic polynomial by the Faddeev-LeVerrier
/// recurrence: `x^d + c[0] x^{d-1} + ... + c[d-1]`.
fn char_poly(a: &FMat) -> Vec<f64> {
    let d = a.dim();
    let mut coeffs = Vec::with_capacity(d);
    let mut m = FMat::identity(d);
    for k in 1..=d {
        m = a.mul(&m);
        let trace: f64 = (0..d).map(|i| m[(i, i)]).sum();
        let c = -trace / k as f64;
        coeffs.push(c);
        for i in 0..d {
            m[(i, i)] += c;
        }
    }
    coeffs
}

/// All complex roots of a monic polynomial by Durand-Kerner iteration.
///
/// Robust for the degrees encountered here (<= 20). Clustered roots lose
/// some figures, which is why eigenvalue-based bounds carry wider
/// tolerances than singular-value ones.
fn durand_kerner(coeffs: &[f64]) -> Result<Vec<Complex64>> {
    let d = coeffs.len();
    if d == 0 {
        return Ok(vec![]);
    }
    let scale = 1.0 + coeffs.iter().fold(0.0_f64, |m, c| m.max(c.abs()));
    let seed = Complex64::new(0.4, 0.9);
    let mut roots: Vec<Complex64> = (0..d).map(|k| seed.powu(k as u32 + 1) * scale).collect();
    let eval = |z: Complex64| {
        let mut p = Complex64::new(1.0, 0.0);
        for &c in coeffs {
            p = p * z + c;
        }
        p
    };
    for _ in 0..600 {
        let mut moved = 0.0_f64;
        for i in 0..d {
            let mut denom = Complex64::new(1.0, 0.0);
            for j in 0..d {
                if i != j {
                    denom *= roots[i] - roots[j];
                }
            }
            if denom.norm() == 0.0 {
                // Coincident iterates; nudge and continue.
                roots[i] += Complex64::new(1e-8 * scale, 1e-8 * scale);
                continue;
            }
            let delta = eval(roots[i]) / denom;
            roots[i] -= delta;
            moved = moved.max(delta.norm());
        }
        if moved <= 1e-15 * scale {
            return Ok(roots);
        }
    }
    // Accept the iterate if the residuals are small even without the
    // step-size criterion firing (happens for tight clusters).
    let worst = roots
        .iter()
        .map(|&z| eval(z).norm())
        .fold(0.0_f64, f64::max);
    if worst <= 1e-8 * scale.powi(d as i32) {
        return Ok(roots);
    }
    Err(Error::Numeric(format!(
        "eigenvalue iteration did not converge (degree {d}, residual {worst:.3e})"
    )))
}

/// All complex eigenvalues (unsorted) via the characteristic polynomial.
pub fn eigenvalues(a: &FMat) -> Result<Vec<Complex64>> {
    if !a.all_finite() {
        return Err(Error::Input("matrix has non-finite entries".into()));
    }
    // Scale to unit size first: Durand-Kerner accuracy degrades when the
    // coefficients span many orders of magnitude.
    let norm = a.max_abs();
    let (scaled, factor) = if norm > 0.0 && norm.is_finite() {
        (a.scale(&(1.0 / norm)), norm)
    } else {
        (a.clone(), 1.0)
    };
    let roots = durand_kerner(&char_poly(&scaled))?;
    Ok(roots.into_iter().map(|z| z * factor).collect())
}

/// Eigenvalue moduli via the characteristic polynomial.
pub fn eigen_moduli(a: &FMat) -> Result<EigenModuli> {
    let roots = eigenvalues(a)?;
    let mut values: Vec<f64> = roots.iter().map(|z| z.norm()).collect();
    values.sort_by(|x, y| y.partial_cmp(x).unwrap());
    Ok(EigenModuli {
        values,
        float_precision: true,
    })
}

/// Spectral radius of a general (signed) matrix.
pub fn spectral_radius(a: &FMat) -> Result<f64> {
    Ok(eigen_moduli(a)?.spectral_radius())
}
