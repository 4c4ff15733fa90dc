use crate::multilinear::{log_svf, singular_values, FMat};
use crate::pressure::{pressure_estimate, Potential, PressureEstimate, PressureOpts};
use crate::tuple::MatrixTuple;
use crate::{Error, Result};
use serde::Serialize;

/// Pressure analysis of a 3D tuple in block-diagonal `1 (+) 2` form with
/// irreducible 2x2 part, for `1 < s < 2`. The three auxiliary norm
/// pressures correspond to the three possible orderings of the Lyapunov
/// exponents, and the singular value pressure is their maximum.
#[derive(Debug, Clone, Serialize)]
pub struct Reducible3dReport {
    pub s: f64,
    /// `P(||.||^{s-1})` of `|b_i|^{1/(s-1)} C_i` (scalar exponent leads).
    pub scalar_leading: PressureEstimate,
    /// `P(||.||)` of `|b_i|^{s-1} C_i` (scalar exponent in the middle).
    pub scalar_middle: PressureEstimate,
    /// `P(||.||^{2-s})` of `|det C_i|^{(s-1)/(2-s)} C_i` (scalar trails).
    pub scalar_trailing: PressureEstimate,
    /// Elementwise max of the three candidate intervals.
    pub combined: PressureEstimate,
}

fn scaled_tuple(c_mats: &[FMat], factors: &[f64]) -> Result<MatrixTuple> {
    let mats: Vec<FMat> = c_mats
        .iter()
        .zip(factors)
        .map(|(c, &f)| {
            if !(f.is_finite() && f > 0.0) {
                return Err(Error::Numeric(format!(
                    "auxiliary scale factor {f} is not positive and finite"
                )));
            }
            Ok(c.scale(&f))
        })
        .collect::<Result<_>>()?;
    MatrixTuple::from_float(mats, None)
}

/// The three auxiliary candidates and their combined interval.
pub fn reducible3d_pressure(
    b: &[f64],
    c_mats: &[FMat],
    s: f64,
    opts: &PressureOpts,
) -> Result<Reducible3dReport> {
    if b.len() != c_mats.len() || b.len() < 2 {
        return Err(Error::Input(
            "scalar and 2x2 parts must pair up (N >= 2)".into(),
        ));
    }
    if !(s > 1.0 && s < 2.0) {
        return Err(Error::Input(format!(
            "the 1 (+) 2 analysis needs 1 < s < 2, got s={s}"
        )));
    }
    if c_mats.iter().any(|m| m.dim() != 2) || b.iter().any(|x| *x == 0.0 || !x.is_finite()) {
        return Err(Error::Input(
            "expected nonzero scalars and 2x2 blocks".into(),
        ));
    }
    let leading = scaled_tuple(
        c_mats,
        &b.iter()
            .map(|x| x.abs().powf(1.0 / (s - 1.0)))
            .collect::<Vec<_>>(),
    )?;
    let middle = scaled_tuple(
        c_mats,
        &b.iter().map(|x| x.abs().powf(s - 1.0)).collect::<Vec<_>>(),
    )?;
    let trailing = scaled_tuple(
        c_mats,
        &c_mats
            .iter()
            .map(|m| m.det().abs().powf((s - 1.0) / (2.0 - s)))
            .collect::<Vec<_>>(),
    )?;
    let scalar_leading = pressure_estimate(&leading, &Potential::norm_pow(s - 1.0), opts)?;
    let scalar_middle = pressure_estimate(&middle, &Potential::norm_pow(1.0), opts)?;
    let scalar_trailing = pressure_estimate(&trailing, &Potential::norm_pow(2.0 - s), opts)?;
    let all = [&scalar_leading, &scalar_middle, &scalar_trailing];
    let combined = PressureEstimate {
        lower: all
            .iter()
            .map(|e| e.lower)
            .fold(f64::NEG_INFINITY, f64::max),
        upper: all
            .iter()
            .map(|e| e.upper)
            .fold(f64::NEG_INFINITY, f64::max),
        n_used: all.iter().map(|e| e.n_used).max().unwrap(),
        methods: vec!["max-of-three-auxiliary-norm-pressures".into()],
        exact: all.iter().all(|e| e.exact),
    };
    Ok(Reducible3dReport {
        s,
        scalar_leading,
        scalar_middle,
        scalar_trailing,
        combined,
    })
}

/// Per-word form of the identity behind the candidates: for the block
/// diagonal word product `diag(b_w, C_w)`,
/// `log phi^s = max(e1, e2, e3)` with
/// `e1 = log|b_w| + (s-1) log||C_w||`,
/// `e2 = log||C_w|| + (s-1) log|b_w|`,
/// `e3 = log a_1(C_w) + (s-1) log a_2(C_w)`.
pub fn word_identity_values(b_w: f64, c_w: &FMat, s: f64) -> Result<(f64, [f64; 3])> {
    let spec = singular_values(c_w)?;
    let (a1, a2) = (spec.values[0].ln(), spec.values[1].ln());
    let lb = b_w.abs().ln();
    let e1 = lb + (s - 1.0) * a1;
    let e2 = a1 + (s - 1.0) * lb;
    let e3 = a1 + (s - 1.0) * a2;
    // assemble the full 3x3 block word product and evaluate phi directly
    let mut full = FMat::zero(3);
    full[(0, 0)] = b_w;
    for i in 0..2 {
        for j in 0..2 {
            full[(1 + i, 1 + j)] = c_w[(i, j)];
        }
    }
    let log_phi = log_svf(&full, s)?;
    Ok((log_phi, [e1, e2, e3]))
}
