use super::classify::identity_diagonal_form;
use super::lift::{permutation_lift, wedge_abs_lift};
use crate::multilinear::FMat;
use crate::perron;
use crate::pressure::{
    affinity_dimension, affinity_dimension_exact, log_sum_exp, similitude_factors,
    AffinityDimension, PressureOpts,
};
use crate::structure::{
    block_diagonal_tuple, block_triangularize, detect_generalized_permutation, PermDetectOpts,
    PermutationForm,
};
use crate::tuple::MatrixTuple;
use crate::Result;

/// Exact pressure function for the tuple classes that admit one:
/// similitudes (multiplicative potential) and generalized permutation
/// tuples, possibly after block-diagonal reduction (which preserves the
/// pressure at every parameter).
pub enum PressureOracle {
    Similitude {
        factors: Vec<f64>,
        count: usize,
    },
    GenPerm {
        form: PermutationForm,
        dim: usize,
        count: usize,
    },
}

impl PressureOracle {
    /// Try to put the tuple into an exact-pressure class.
    pub fn detect(tuple: &MatrixTuple, detect_opts: &PermDetectOpts) -> Result<Option<Self>> {
        if let Some(factors) = similitude_factors(tuple) {
            return Ok(Some(PressureOracle::Similitude {
                factors,
                count: tuple.count(),
            }));
        }
        if let Some(form) = detect_generalized_permutation(tuple, detect_opts)? {
            return Ok(Some(PressureOracle::GenPerm {
                form,
                dim: tuple.dim(),
                count: tuple.count(),
            }));
        }
        if let Some(tri) = block_triangularize(tuple)? {
            // dropping the off-diagonal blocks leaves the pressure curve
            // unchanged
            let residual = tri.residual(tuple)?;
            if residual <= 1e-10 {
                let reduced = block_diagonal_tuple(tuple, &tri)?;
                if reduced.is_diagonal() {
                    return Ok(Some(PressureOracle::GenPerm {
                        form: identity_diagonal_form(&reduced),
                        dim: tuple.dim(),
                        count: tuple.count(),
                    }));
                }
                if let Some(form) = detect_generalized_permutation(&reduced, detect_opts)? {
                    return Ok(Some(PressureOracle::GenPerm {
                        form,
                        dim: tuple.dim(),
                        count: tuple.count(),
                    }));
                }
            }
        }
        Ok(None)
    }

    pub fn dim(&self) -> usize {
        match self {
            PressureOracle::Similitude { factors, .. } => {
                let _ = factors;
                usize::MAX // dimension-independent formula; caller supplies range
            }
            PressureOracle::GenPerm { dim, .. } => *dim,
        }
    }

    /// `P(phi^s)`, exact for the detected class.
    pub fn pressure(&self, s: f64) -> Result<f64> {
        match self {
            PressureOracle::Similitude { factors, .. } => Ok(log_sum_exp(
                &factors.iter().map(|r| s * r.ln()).collect::<Vec<_>>(),
            )),
            PressureOracle::GenPerm { form, dim, count } => {
                let d = *dim;
                if s <= 0.0 {
                    return Ok((*count as f64).ln());
                }
                if s >= d as f64 {
                    // |det|^{s/d} branch, multiplicative
                    let logs: Vec<f64> = form
                        .scalars_f
                        .iter()
                        .map(|sc| s / d as f64 * sc.iter().map(|a| a.abs().ln()).sum::<f64>())
                        .collect();
                    return Ok(log_sum_exp(&logs));
                }
                let k = s.floor() as usize;
                let lift = if (s - k as f64).abs() < 1e-12 && k >= 1 {
                    wedge_abs_lift(form, k)?
                } else {
                    permutation_lift(form, s, k)?
                };
                let mut sum = FMat::zero(lift.dim());
                for m in &lift.mats {
                    for i in 0..lift.dim() {
                        for j in 0..lift.dim() {
                            sum[(i, j)] += m[(i, j)];
                        }
                    }
                }
                Ok(perron::perron_root(&sum)?.ln())
            }
        }
    }
}

/// Affinity dimension, routed through the exact pressure function when the
/// tuple belongs to an exact class and through the certified bound curves
/// otherwise.
pub fn affinity_dimension_auto(
    tuple: &MatrixTuple,
    opts: &PressureOpts,
    detect_opts: &PermDetectOpts,
) -> Result<AffinityDimension> {
    let contractive = tuple.is_contractive()?;
    match PressureOracle::detect(tuple, detect_opts)? {
        Some(oracle) => {
            let mut f = |s: f64| oracle.pressure(s);
            let method = match &oracle {
                PressureOracle::Similitude { .. } => "similitude",
                PressureOracle::GenPerm { .. } => "generalized-permutation",
            };
            affinity_dimension_exact(&mut f, tuple.dim(), contractive, opts.tol, method)
        }
        None => affinity_dimension(tuple, opts),
    }
}
