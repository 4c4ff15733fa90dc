use super::lift::{permutation_lift, wedge_abs_lift, LiftedTuple};
use super::reducible3d::{reducible3d_pressure, Reducible3dReport};
use super::states::{nonneg_equilibria, GibbsData, StateReport};
use crate::multilinear::FMat;
use crate::pressure::{
    pressure_estimate, similitude_factors, Potential, PressureEstimate, PressureOpts,
};
use crate::structure::{
    block_diagonal_tuple, block_triangularize, detect_generalized_permutation, irreducibility_test,
    k_irreducibility, quasimult_search, PermDetectOpts, PermutationForm, QuasimultReport,
    StructureReport, Verdict,
};
use crate::symbolic::{BernoulliSpec, MeasureSpec};
use crate::tuple::MatrixTuple;
use crate::{Error, Result};
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Route {
    /// Scalar multiples of isometries: multiplicative potential, one
    /// explicit Bernoulli state.
    Similitude,
    /// Generalized permutation tuple (possibly after a basis change):
    /// explicit states through the nonnegative lift.
    GeneralizedPermutation,
    /// Diagonal tuple after block-diagonal reduction: explicit states.
    Diagonal,
    /// Block-diagonal 1 (+) 2 with irreducible 2x2 part: three candidate
    /// norm pressures, no explicit states.
    ReducibleOnePlusTwo,
    /// Irreducible tuple in a norm-potential range: a unique fully
    /// supported state exists, not finitely constructible here.
    NormIrreducibleUnique,
    /// Irreducible, not detectably a permutation tuple, 1 < s < 2: if the
    /// tuple is strongly irreducible the state is unique; not verifiable,
    /// so the worst-case bound is reported.
    StronglyIrreducibleCandidate,
    /// Structure unresolved: pressure bounds only.
    BoundsOnly,
}

#[derive(Debug, Clone)]
pub struct ClassifyOpts {
    pub pressure: PressureOpts,
    pub detect: PermDetectOpts,
    pub quasi_n: usize,
    pub quasi_k: usize,
}

impl Default for ClassifyOpts {
    fn default() -> Self {
        ClassifyOpts {
            pressure: PressureOpts::default(),
            detect: PermDetectOpts::default(),
            quasi_n: 4,
            quasi_k: 2,
        }
    }
}

/// Classification outcome: the route taken, the pressure (exact or
/// two-sided), explicit states when the route supports them, and the
/// multiplicity bound the governing theorem grants.
#[derive(Debug, Clone)]
pub struct EquilibriumReport {
    pub route: Route,
    pub pressure: PressureEstimate,
    pub states: Vec<StateReport>,
    pub multiplicity_bound: usize,
    pub exact: bool,
    pub notes: Vec<String>,
    pub structure: Option<StructureReport>,
    pub quasimult: Option<QuasimultReport>,
    pub reducible3d: Option<Reducible3dReport>,
    /// Basis change into the generalized-permutation form used for the
    /// lift, when one was applied.
    pub perm_basis: Option<FMat>,
    pub lift: Option<LiftedTuple>,
}

fn theorem_bound_3d(s: f64) -> usize {
    if s > 1.0 && s < 2.0 {
        6
    } else {
        3
    }
}

fn similitude_report(s: f64, factors: Vec<f64>) -> Result<EquilibriumReport> {
    let logs: Vec<f64> = factors.iter().map(|r| s * r.ln()).collect();
    let pressure = crate::pressure::log_sum_exp(&logs);
    let probs: Vec<f64> = logs.iter().map(|l| (l - pressure).exp()).collect();
    let spec = MeasureSpec::Bernoulli(BernoulliSpec::new(probs)?);
    let state = StateReport {
        spec,
        pressure,
        fully_supported: true,
        component: Vec::new(),
        period: 1,
        gibbs: GibbsData {
            c_comp: 1.0,
            kappa: 1.0,
        },
    };
    Ok(EquilibriumReport {
        route: Route::Similitude,
        pressure: PressureEstimate::exact_value(pressure, "similitude"),
        states: vec![state],
        multiplicity_bound: 1,
        exact: true,
        notes: vec!["multiplicative potential: the Gibbs ratio is exactly 1".into()],
        structure: None,
        quasimult: None,
        reducible3d: None,
        perm_basis: None,
        lift: None,
    })
}

/// Lift a generalized permutation form at `s` (integer or not) and read
/// off the equilibrium states of the nonnegative lift.
fn perm_route(
    tuple: &MatrixTuple,
    form: PermutationForm,
    s: f64,
    route: Route,
    mut notes: Vec<String>,
    structure: Option<StructureReport>,
) -> Result<EquilibriumReport> {
    let _ = tuple;
    let lift = if (s - s.round()).abs() < f64::EPSILON && s.round() >= 1.0 {
        wedge_abs_lift(&form, s.round() as usize)?
    } else {
        permutation_lift(&form, s, s.floor() as usize)?
    };
    let eq = nonneg_equilibria(&lift.mats)?;
    notes.push(format!(
        "lift dimension {}: at most that many ergodic states",
        lift.dim()
    ));
    Ok(EquilibriumReport {
        route,
        pressure: PressureEstimate::exact_value(eq.pressure, "perron-lift"),
        states: eq.states,
        multiplicity_bound: lift.dim(),
        exact: true,
        notes,
        structure,
        quasimult: None,
        reducible3d: None,
        perm_basis: Some(form.basis_f.clone()),
        lift: Some(lift),
    })
}

/// Complete classification pipeline for 3x3 tuples at `0 < s < 3`.
///
/// The route order mirrors the structure of the problem: multiplicative
/// tuples first, then tuples that are generalized permutations in some
/// basis (explicit states through the lift), then reducible tuples through
/// block-diagonal reduction, and finally irreducible tuples, where a
/// unique state is guaranteed in the norm ranges and, under strong
/// irreducibility, in the middle range as well.
pub fn classify3d(tuple: &MatrixTuple, s: f64, opts: &ClassifyOpts) -> Result<EquilibriumReport> {
    if tuple.dim() != 3 {
        return Err(Error::Input(format!(
            "the classification pipeline is for 3x3 tuples; got dimension {}",
            tuple.dim()
        )));
    }
    if !(s > 0.0 && s < 3.0) {
        return Err(Error::Input(format!(
            "classification needs 0 < s < 3, got s={s}"
        )));
    }

    if let Some(factors) = similitude_factors(tuple) {
        return similitude_report(s, factors);
    }

    if let Some(form) = detect_generalized_permutation(tuple, &opts.detect)? {
        let identity_basis = form
            .basis_q
            .as_ref()
            .is_some_and(|x| *x == crate::multilinear::QMat::identity(3))
            || form.residual(tuple)? == 0.0 && form.basis_f == FMat::identity(3);
        let notes = if identity_basis {
            vec!["generalized permutation tuple in the given basis".into()]
        } else {
            vec!["generalized permutation tuple after a basis change".into()]
        };
        return perm_route(tuple, form, s, Route::GeneralizedPermutation, notes, None);
    }

    let structure = irreducibility_test(tuple);
    match &structure.verdict {
        Verdict::Reducible(_) => {
            let tri = block_triangularize(tuple)?;
            let Some(tri) = tri else {
                // a reducible verdict without a usable split: stay honest
                return bounds_only_report(
                    tuple,
                    s,
                    opts,
                    Some(structure),
                    vec![
                        "reducible but the invariant subspace is not rationally representable"
                            .into(),
                    ],
                );
            };
            let reduced = block_diagonal_tuple(tuple, &tri)?;
            let mut notes = vec![format!(
                "block-upper-triangular with block dimensions {:?}; off-diagonal blocks \
                 dropped without changing the equilibrium states",
                tri.dims
            )];
            if !tri.certified {
                notes.push("triangularization not certified maximal".into());
            }
            if reduced.is_diagonal() {
                let form = identity_diagonal_form(&reduced);
                return perm_route(&reduced, form, s, Route::Diagonal, notes, Some(structure));
            }
            if let Some(form) = detect_generalized_permutation(&reduced, &opts.detect)? {
                notes.push("reduced tuple is a generalized permutation tuple".into());
                return perm_route(
                    &reduced,
                    form,
                    s,
                    Route::GeneralizedPermutation,
                    notes,
                    Some(structure),
                );
            }
            // 1 (+) 2 with irreducible 2x2 part
            if tri.dims.len() == 2 && s > 1.0 && s < 2.0 {
                let (b, c_mats) = split_one_two(&reduced, &tri.dims)?;
                let r3 = reducible3d_pressure(&b, &c_mats, s, &opts.pressure)?;
                notes.push(
                    "three auxiliary norm pressures bound the singular value pressure; \
                     explicit states are not available on this route"
                        .into(),
                );
                return Ok(EquilibriumReport {
                    route: Route::ReducibleOnePlusTwo,
                    pressure: r3.combined.clone(),
                    states: Vec::new(),
                    multiplicity_bound: 3,
                    exact: false,
                    notes,
                    structure: Some(structure),
                    quasimult: None,
                    reducible3d: Some(r3),
                    perm_basis: None,
                    lift: None,
                });
            }
            notes.push("norm-range reducible case: pressure bounds only".into());
            bounds_only_report(tuple, s, opts, Some(structure), notes)
        }
        Verdict::Irreducible => {
            if s > 1.0 && s < 2.0 {
                let quasi =
                    quasimult_search(tuple, s, opts.quasi_k, opts.quasi_n, opts.pressure.budget)?;
                let pressure = pressure_estimate(tuple, &Potential::svf(s), &opts.pressure)?;
                let notes = vec![
                    "irreducible and not detectably a generalized permutation tuple".into(),
                    "under strong irreducibility of the tuple or its second exterior power \
                     the equilibrium state is unique, fully supported, and Gibbs; that \
                     hypothesis is not finitely checkable, so the worst-case bound is kept"
                        .into(),
                ];
                return Ok(EquilibriumReport {
                    route: Route::StronglyIrreducibleCandidate,
                    pressure,
                    states: Vec::new(),
                    multiplicity_bound: theorem_bound_3d(s),
                    exact: false,
                    notes,
                    structure: Some(structure),
                    quasimult: Some(quasi),
                    reducible3d: None,
                    perm_basis: None,
                    lift: None,
                });
            }
            // norm ranges: 0 < s <= 1 uses the tuple itself, 2 <= s < 3 its
            // second exterior power
            let unique = if s <= 1.0 {
                true
            } else {
                k_irreducibility(tuple, 2)?.verdict.is_irreducible()
            };
            let pressure = pressure_estimate(tuple, &Potential::svf(s), &opts.pressure)?;
            if unique {
                Ok(EquilibriumReport {
                    route: Route::NormIrreducibleUnique,
                    pressure,
                    states: Vec::new(),
                    multiplicity_bound: 1,
                    exact: false,
                    notes: vec![
                        "norm-potential range with an irreducible (exterior power) tuple: \
                         the equilibrium state is unique and fully supported; no finite \
                         construction is available for it"
                            .into(),
                    ],
                    structure: Some(structure),
                    quasimult: None,
                    reducible3d: None,
                    perm_basis: None,
                    lift: None,
                })
            } else {
                bounds_only_report(
                    tuple,
                    s,
                    opts,
                    Some(structure),
                    vec!["norm range with a reducible exterior power: bounds only".into()],
                )
            }
        }
        Verdict::Unknown => bounds_only_report(
            tuple,
            s,
            opts,
            Some(structure),
            vec!["structure verdict unknown: reporting pressure bounds only".into()],
        ),
    }
}

fn bounds_only_report(
    tuple: &MatrixTuple,
    s: f64,
    opts: &ClassifyOpts,
    structure: Option<StructureReport>,
    mut notes: Vec<String>,
) -> Result<EquilibriumReport> {
    let pressure = pressure_estimate(tuple, &Potential::svf(s), &opts.pressure)?;
    notes.push("every equilibrium state of a 3x3 tuple is fully supported".into());
    Ok(EquilibriumReport {
        route: Route::BoundsOnly,
        pressure,
        states: Vec::new(),
        multiplicity_bound: theorem_bound_3d(s),
        exact: false,
        notes,
        structure,
        quasimult: None,
        reducible3d: None,
        perm_basis: None,
        lift: None,
    })
}

/// Identity-permutation form of a diagonal tuple.
pub(crate) fn identity_diagonal_form(tuple: &MatrixTuple) -> PermutationForm {
    let d = tuple.dim();
    PermutationForm {
        basis_f: FMat::identity(d),
        basis_q: None,
        perms: vec![(0..d).collect(); tuple.count()],
        scalars_f: tuple
            .float_mats()
            .iter()
            .map(|m| (0..d).map(|i| m[(i, i)]).collect())
            .collect(),
        scalars_q: None,
    }
}

/// Extract scalars and 2x2 blocks from a block-diagonal tuple with dims
/// `[1, 2]` or `[2, 1]`.
fn split_one_two(tuple: &MatrixTuple, dims: &[usize]) -> Result<(Vec<f64>, Vec<FMat>)> {
    let (scalar_first, ok) = match dims {
        [1, 2] => (true, true),
        [2, 1] => (false, true),
        _ => (false, false),
    };
    if !ok {
        return Err(Error::Input(format!(
            "expected block dims [1,2] or [2,1], got {dims:?}"
        )));
    }
    let mut b = Vec::new();
    let mut c = Vec::new();
    for m in tuple.float_mats() {
        if scalar_first {
            b.push(m[(0, 0)]);
            c.push(FMat::from_fn(2, |i, j| m[(1 + i, 1 + j)]));
        } else {
            b.push(m[(2, 2)]);
            c.push(FMat::from_fn(2, |i, j| m[(i, j)]));
        }
    }
    Ok((b, c))
}
