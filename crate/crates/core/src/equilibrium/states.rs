use super::lift::{permutation_lift, LiftedTuple};
use crate::multilinear::{singular_values, FMat};
use crate::perron;
use crate::structure::PermutationForm;
use crate::symbolic::{
    cylinder_measure, enumerate_words, BernoulliSpec, MeasureSpec, PerronGibbsSpec,
};
use crate::tuple::MatrixTuple;
use crate::{Error, Result};
use serde::Serialize;

/// A-priori Gibbs data derived from the Perron vectors of one lift
/// component: the cylinder-to-potential ratio of the state lies in
/// `[1/(c_comp * kappa^n), c_comp]` for words of length n. For a state
/// whose component spans the whole lift, `kappa = 1` and the bound is the
/// uniform Gibbs property.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct GibbsData {
    pub c_comp: f64,
    pub kappa: f64,
}

impl GibbsData {
    pub fn constant_at(&self, n: usize) -> f64 {
        self.c_comp * self.kappa.powi(n as i32)
    }
}

/// One ergodic equilibrium-state candidate with its construction data.
#[derive(Debug, Clone)]
pub struct StateReport {
    pub spec: MeasureSpec,
    pub pressure: f64,
    pub fully_supported: bool,
    /// Lift coordinates of the strongly connected component carrying the
    /// state.
    pub component: Vec<usize>,
    pub period: usize,
    pub gibbs: GibbsData,
}

/// Construction outcome for a class with explicit states.
#[derive(Debug, Clone)]
pub struct NonnegEquilibria {
    pub pressure: f64,
    pub states: Vec<StateReport>,
    /// Dimension of the lift, an upper bound for the number of ergodic
    /// states.
    pub lift_dim: usize,
}

/// Equilibrium states of an entrywise-nonnegative tuple for the norm
/// potential: decompose the support digraph of the sum matrix into
/// strongly connected components, keep the components of maximal Perron
/// value, and attach one Perron-Gibbs state to each.
pub fn nonneg_equilibria(mats: &[FMat]) -> Result<NonnegEquilibria> {
    let m = mats[0].dim();
    if mats.len() < 2 {
        return Err(Error::Input("need at least two matrices".into()));
    }
    let mut sum = FMat::zero(m);
    for a in mats {
        for i in 0..m {
            for j in 0..m {
                if a[(i, j)] < 0.0 {
                    return Err(Error::Input("lift matrices must be nonnegative".into()));
                }
                sum[(i, j)] += a[(i, j)];
            }
        }
    }
    let adj = perron::support_adjacency(&sum);
    let comps = perron::sccs(&adj);
    struct CompData {
        nodes: Vec<usize>,
        rho: f64,
        left: Vec<f64>,
        right: Vec<f64>,
        period: usize,
    }
    let mut datas: Vec<CompData> = Vec::new();
    for nodes in comps {
        if nodes.len() == 1 && sum[(nodes[0], nodes[0])] == 0.0 {
            continue; // nilpotent slot carries no measure
        }
        let sub = perron::restrict(&sum, &nodes);
        let (rho, left, right) = perron::perron_data(&sub)?;
        let period = perron::cyclicity(&nodes, &adj);
        datas.push(CompData {
            nodes,
            rho,
            left,
            right,
            period,
        });
    }
    if datas.is_empty() {
        return Err(Error::Domain("the lift sum matrix is nilpotent".into()));
    }
    let rho_max = datas.iter().map(|c| c.rho).fold(0.0_f64, f64::max);
    let pressure = rho_max.ln();
    // full-lift operator norms of the generators, for the kappa factor
    let full_norms: Vec<f64> = mats
        .iter()
        .map(|a| singular_values(a).map(|s| s.values[0]))
        .collect::<Result<_>>()?;

    let mut states: Vec<StateReport> = Vec::new();
    for comp in &datas {
        if comp.rho < rho_max * (1.0 - 1e-12) {
            continue;
        }
        let restricted: Vec<FMat> = mats
            .iter()
            .map(|a| perron::restrict(a, &comp.nodes))
            .collect();
        // kappa = max_i ||M_i|| / (smallest positive entry of the
        // restricted M_i); every restricted product has a support path, so
        // its top entry is at least the product of these minima.
        let mut kappa = 1.0_f64;
        for (a, &norm) in restricted.iter().zip(&full_norms) {
            let mc = comp.nodes.len();
            let mut min_pos = f64::INFINITY;
            for i in 0..mc {
                for j in 0..mc {
                    let e = a[(i, j)];
                    if e > 0.0 && e < min_pos {
                        min_pos = e;
                    }
                }
            }
            if min_pos.is_finite() && min_pos > 0.0 {
                kappa = kappa.max(norm / min_pos);
            }
        }
        let sum_u: f64 = comp.left.iter().sum();
        let sum_v: f64 = comp.right.iter().sum();
        let min_u = comp.left.iter().cloned().fold(f64::INFINITY, f64::min);
        let min_v = comp.right.iter().cloned().fold(f64::INFINITY, f64::min);
        let mc = comp.nodes.len();
        let c_comp = (sum_u * sum_v).max(mc as f64 / (min_u * min_v)).max(1.0);
        let gibbs = GibbsData {
            c_comp,
            kappa: kappa.max(1.0),
        };

        let spec = if mc == 1 {
            let probs: Vec<f64> = restricted.iter().map(|a| a[(0, 0)] / comp.rho).collect();
            MeasureSpec::Bernoulli(BernoulliSpec::new(probs)?)
        } else {
            MeasureSpec::PerronGibbs(PerronGibbsSpec::new(
                restricted,
                comp.rho,
                comp.left.clone(),
                comp.right.clone(),
                comp.period,
            )?)
        };
        let fully_supported = min_cylinder_mass(&spec, 3)? > 0.0;
        states.push(StateReport {
            spec,
            pressure,
            fully_supported,
            component: comp.nodes.clone(),
            period: comp.period,
            gibbs,
        });
    }
    // distinct ergodic states are separated by short cylinders; states
    // with identical masses up to length 2 describe one measure
    let states = dedupe_states(states)?;
    Ok(NonnegEquilibria {
        pressure,
        states,
        lift_dim: m,
    })
}

fn min_cylinder_mass(spec: &MeasureSpec, n: usize) -> Result<f64> {
    let alphabet = spec.alphabet();
    let mut min = f64::INFINITY;
    for len in 1..=n {
        for w in enumerate_words(alphabet, len, 1 << 20)? {
            min = min.min(cylinder_measure(spec, &w)?);
        }
    }
    Ok(min)
}

/// Distinct ergodic states separate on some finite cylinder, but not
/// always a short one: conjugate lift components can agree on every
/// cylinder of length <= 3 and split only at length 4. Compare down to
/// length 6 (capped by a word budget) before declaring two states equal.
fn dedupe_states(states: Vec<StateReport>) -> Result<Vec<StateReport>> {
    const TOL: f64 = 1e-10;
    const WORD_CAP: u64 = 4096;
    let mut kept: Vec<StateReport> = Vec::new();
    'outer: for state in states {
        for prev in &kept {
            let alphabet = state.spec.alphabet();
            let mut same = true;
            'depth: for len in 1..=6usize {
                if crate::symbolic::word_count(alphabet, len).is_none_or(|c| c > WORD_CAP) {
                    break;
                }
                for w in enumerate_words(alphabet, len, WORD_CAP)? {
                    let a = cylinder_measure(&state.spec, &w)?;
                    let b = cylinder_measure(&prev.spec, &w)?;
                    if (a - b).abs() > TOL {
                        same = false;
                        break 'depth;
                    }
                }
            }
            if same {
                continue 'outer;
            }
        }
        kept.push(state);
    }
    Ok(kept)
}

/// Explicit equilibrium states of a tuple of diagonal matrices at a
/// non-integer parameter: lift along the identity permutations and run the
/// nonnegative machinery. The number of distinct states is bounded by the
/// lift dimension `(d-k) C(d,k)`.
pub fn diagonal_equilibria(tuple: &MatrixTuple, s: f64) -> Result<NonnegEquilibria> {
    if !tuple.is_diagonal() {
        return Err(Error::Input(
            "diagonal equilibria need a diagonal tuple".into(),
        ));
    }
    let d = tuple.dim();
    let k = s.floor() as usize;
    if !(s > k as f64 && s < (k + 1) as f64 && k < d) {
        return Err(Error::Input(format!(
            "diagonal route needs a non-integer s in (0, {d}), got {s}"
        )));
    }
    let form = PermutationForm {
        basis_f: FMat::identity(d),
        basis_q: None,
        perms: vec![(0..d).collect(); tuple.count()],
        scalars_f: tuple
            .float_mats()
            .iter()
            .map(|m| (0..d).map(|i| m[(i, i)]).collect())
            .collect(),
        scalars_q: None,
    };
    let lift = permutation_lift(&form, s, k)?;
    nonneg_equilibria(&lift.mats)
}

/// Per-word Gibbs ratio audit of one explicitly constructed state against
/// the singular value function of the tuple (in the basis where the lift
/// identity holds): `mu([w]) e^{nP} / phi^s(A_w)` over all words of length
/// up to `n_max`, compared with the Perron-derived constant.
#[derive(Debug, Clone, Serialize)]
pub struct GibbsCheck {
    pub n_max: usize,
    pub min_ratio: f64,
    pub max_ratio: f64,
    /// The a-priori constant at the deepest tested length.
    pub constant: f64,
    pub within: bool,
}

pub fn gibbs_check(
    state: &StateReport,
    tuple: &MatrixTuple,
    s: f64,
    n_max: usize,
    budget: u64,
) -> Result<GibbsCheck> {
    let pressure = state.pressure;
    let mut min_ratio = f64::INFINITY;
    let mut max_ratio = 0.0_f64;
    for n in 1..=n_max {
        for w in enumerate_words(tuple.count(), n, budget)? {
            let mass = cylinder_measure(&state.spec, &w)?;
            let product = crate::symbolic::word_product(tuple, &w)?;
            let log_phi = crate::multilinear::log_svf(&product, s)?;
            let ratio = (mass.ln() + n as f64 * pressure - log_phi).exp();
            min_ratio = min_ratio.min(ratio);
            max_ratio = max_ratio.max(ratio);
        }
    }
    let constant = state.gibbs.constant_at(n_max);
    let slack = 1.0 + 1e-9;
    let within = max_ratio <= constant * slack && min_ratio >= 1.0 / (constant * slack);
    Ok(GibbsCheck {
        n_max,
        min_ratio,
        max_ratio,
        constant,
        within,
    })
}

/// Same audit but against an explicit lifted tuple (norm potential).
pub fn gibbs_check_lift(
    state: &StateReport,
    lift: &LiftedTuple,
    n_max: usize,
    budget: u64,
) -> Result<GibbsCheck> {
    let pressure = state.pressure;
    let mut min_ratio = f64::INFINITY;
    let mut max_ratio = 0.0_f64;
    for n in 1..=n_max {
        for w in enumerate_words(lift.mats.len(), n, budget)? {
            let mass = cylinder_measure(&state.spec, &w)?;
            let mut product = FMat::identity(lift.dim());
            for &sym in w.symbols() {
                product = product.mul(&lift.mats[sym as usize - 1]);
            }
            let norm = singular_values(&product)?.values[0];
            let ratio = (mass.ln() + n as f64 * pressure - norm.ln()).exp();
            min_ratio = min_ratio.min(ratio);
            max_ratio = max_ratio.max(ratio);
        }
    }
    let constant = state.gibbs.constant_at(n_max);
    let slack = 1.0 + 1e-9;
    let within = max_ratio <= constant * slack && min_ratio >= 1.0 / (constant * slack);
    Ok(GibbsCheck {
        n_max,
        min_ratio,
        max_ratio,
        constant,
        within,
    })
}
