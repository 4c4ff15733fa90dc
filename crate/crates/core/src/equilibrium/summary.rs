use super::classify::{EquilibriumReport, Route};
use crate::pressure::sig17;
use crate::symbolic::MeasureSpec;
use serde::Serialize;

/// Serializable view of one state: defining data as 17-significant-digit
/// decimal strings, so reports are byte-reproducible.
#[derive(Debug, Clone, Serialize)]
pub struct StateSummary {
    pub kind: String,
    pub probs: Option<Vec<String>>,
    pub lifted_matrices: Option<Vec<Vec<Vec<String>>>>,
    pub perron_value: Option<String>,
    pub left_vector: Option<Vec<String>>,
    pub right_vector: Option<Vec<String>>,
    pub pressure: String,
    pub fully_supported: bool,
    pub period: usize,
    pub component: Vec<usize>,
    pub gibbs_c: String,
    pub gibbs_kappa: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct EquilibriumSummary {
    pub route: Route,
    pub pressure_lower: String,
    pub pressure_upper: String,
    pub pressure_exact: bool,
    pub multiplicity_bound: usize,
    pub state_count: usize,
    pub states: Vec<StateSummary>,
    pub notes: Vec<String>,
    pub structure: Option<crate::structure::StructureSummary>,
    pub quasimult: Option<crate::structure::QuasimultReport>,
    pub reducible3d: Option<super::reducible3d::Reducible3dReport>,
}

impl EquilibriumReport {
    pub fn summary(&self) -> EquilibriumSummary {
        let states = self
            .states
            .iter()
            .map(|st| {
                let (kind, probs, lifted, rho, left, right) = match &st.spec {
                    MeasureSpec::Bernoulli(b) => (
                        "bernoulli".to_string(),
                        Some(b.probs.iter().map(|p| sig17(*p)).collect()),
                        None,
                        None,
                        None,
                        None,
                    ),
                    MeasureSpec::Markov(m) => (
                        "markov".to_string(),
                        Some(m.stationary.iter().map(|p| sig17(*p)).collect()),
                        None,
                        None,
                        None,
                        None,
                    ),
                    MeasureSpec::PerronGibbs(p) => {
                        let mats = p
                            .mats
                            .iter()
                            .map(|m| {
                                (0..m.dim())
                                    .map(|i| (0..m.dim()).map(|j| sig17(m[(i, j)])).collect())
                                    .collect()
                            })
                            .collect();
                        (
                            "perron-gibbs".to_string(),
                            None,
                            Some(mats),
                            Some(sig17(p.perron_value)),
                            Some(p.left.iter().map(|x| sig17(*x)).collect()),
                            Some(p.right.iter().map(|x| sig17(*x)).collect()),
                        )
                    }
                };
                StateSummary {
                    kind,
                    probs,
                    lifted_matrices: lifted,
                    perron_value: rho,
                    left_vector: left,
                    right_vector: right,
                    pressure: sig17(st.pressure),
                    fully_supported: st.fully_supported,
                    period: st.period,
                    component: st.component.clone(),
                    gibbs_c: sig17(st.gibbs.c_comp),
                    gibbs_kappa: sig17(st.gibbs.kappa),
                }
            })
            .collect();
        EquilibriumSummary {
            route: self.route,
            pressure_lower: sig17(self.pressure.lower),
            pressure_upper: sig17(self.pressure.upper),
            pressure_exact: self.pressure.exact,
            multiplicity_bound: self.multiplicity_bound,
            state_count: self.states.len(),
            states,
            notes: self.notes.clone(),
            structure: self.structure.as_ref().map(|s| s.summary()),
            quasimult: self.quasimult.clone(),
            reducible3d: self.reducible3d.clone(),
        }
    }
}
