use super::eigen::eigen_moduli;
use super::jacobi::singular_values;
use super::mat::FMat;
use crate::{Error, Result};

/// Relative floor below which a singular value counts as zero for the
/// purposes of invertibility.
const SINGULAR_FLOOR: f64 = 1e-13;

/// log of the singular value function at parameter `s`.
///
/// For `k <= s < k+1` with `k < d` this is
/// `log(a_1 ... a_k) + (s-k) log a_{k+1}`; for `s >= d` it is
/// `(s/d) log|det|`. Everything is evaluated in the log domain so that
/// word products of length ~12 with large entries stay representable.
pub fn log_svf(a: &FMat, s: f64) -> Result<f64> {
    if s < 0.0 {
        return Err(Error::Input(format!(
            "svf parameter s={s} must be nonnegative"
        )));
    }
    let d = a.dim();
    let spec = singular_values(a)?;
    if spec.min() <= SINGULAR_FLOOR * spec.values[0].max(1.0) {
        return Err(Error::Domain(
            "singular value function needs an invertible matrix".into(),
        ));
    }
    let logs: Vec<f64> = spec.values.iter().map(|v| v.ln()).collect();
    Ok(log_svf_from_logs(&logs, s, d))
}

/// Assemble log(phi^s) from pre-sorted log singular values.
pub(crate) fn log_svf_from_logs(logs: &[f64], s: f64, d: usize) -> f64 {
    if s >= d as f64 {
        let log_det: f64 = logs.iter().sum();
        return s / d as f64 * log_det;
    }
    let k = s.floor() as usize;
    let mut acc: f64 = logs[..k].iter().sum();
    if s > k as f64 {
        acc += (s - k as f64) * logs[k];
    }
    acc
}

/// Singular value function on the linear scale, with an overflow guard.
pub fn svf(a: &FMat, s: f64) -> Result<f64> {
    let l = log_svf(a, s)?;
    let v = l.exp();
    if !v.is_finite() {
        return Err(Error::Numeric(format!(
            "svf overflows the linear scale (log value {l:.3}); use log_svf"
        )));
    }
    Ok(v)
}

/// log of `||A||^t` for the norm potential.
pub fn log_norm_pow(a: &FMat, t: f64) -> Result<f64> {
    if t < 0.0 {
        return Err(Error::Input(format!(
            "norm power t={t} must be nonnegative"
        )));
    }
    let spec = singular_values(a)?;
    Ok(t * spec.values[0].ln())
}

/// log of the spectral minorant `chi^s(A) = |l_1 .. l_k| |l_{k+1}|^{s-k}`
/// built from eigenvalue moduli. Since `||(A^{wedge k})^m|| >= rho(A^{wedge k})^m`
/// this never exceeds `log_svf` and powers certified pressure lower bounds.
pub fn log_chi(a: &FMat, s: f64) -> Result<f64> {
    let d = a.dim();
    if !(0.0..d as f64).contains(&s) {
        return Err(Error::Input(format!(
            "chi parameter s={s} must lie in [0, d)"
        )));
    }
    let moduli = eigen_moduli(a)?;
    let floor = moduli.values[0].max(1.0) * 1e-300;
    if moduli.values.iter().any(|&m| m <= floor) {
        return Err(Error::Domain("chi needs an invertible matrix".into()));
    }
    let logs: Vec<f64> = moduli.values.iter().map(|v| v.ln()).collect();
    Ok(log_svf_from_logs(&logs, s, d))
}

/// Spectral minorant on the linear scale.
pub fn chi(a: &FMat, s: f64) -> Result<f64> {
    Ok(log_chi(a, s)?.exp())
}
