//! Structural classification of matrix tuples: irreducibility (decided
//! exactly on the rational backend for d <= 3), k-irreducibility through
//! exterior powers, simultaneous block-triangularization, generalized
//! permutation detection, and quasimultiplicativity search.

mod blocks;
mod irreducible;
mod permdetect;
mod quasi;
mod rank;

pub use blocks::{block_diagonal_tuple, block_triangularize, BlockTriangularization};
pub use irreducible::{algebra_closure, irreducibility_test, k_irreducibility, AlgebraClosure};
pub use permdetect::{detect_generalized_permutation, PermDetectOpts, PermutationForm};
pub use quasi::{equal_modulus_probe, quasimult_search, EqualModulusReport, QuasimultReport};

use crate::scalar::Rational;
use crate::tuple::Backend;
use serde::Serialize;

/// A verified invariant-subspace witness: a basis of a proper nontrivial
/// subspace `W` with `A_i W` contained in `W` for every `i`. Exact basis
/// vectors are attached whenever they exist.
#[derive(Debug, Clone)]
pub struct Witness {
    pub basis_f: Vec<Vec<f64>>,
    pub basis_q: Option<Vec<Vec<Rational>>>,
}

impl Witness {
    pub fn dim(&self) -> usize {
        self.basis_f.len()
    }
}

#[derive(Debug, Clone)]
pub enum Verdict {
    Irreducible,
    Reducible(Witness),
    Unknown,
}

impl Verdict {
    pub fn is_irreducible(&self) -> bool {
        matches!(self, Verdict::Irreducible)
    }

    pub fn is_reducible(&self) -> bool {
        matches!(self, Verdict::Reducible(_))
    }
}

/// Outcome of an irreducibility decision.
#[derive(Debug, Clone)]
pub struct StructureReport {
    pub verdict: Verdict,
    /// Exact verdicts and float Reducible verdicts with checkable
    /// witnesses are certified; float Irreducible never is.
    pub certified: bool,
    pub backend: Backend,
    pub notes: Vec<String>,
}

/// Serializable summary for reports.
#[derive(Debug, Clone, Serialize)]
pub struct StructureSummary {
    pub verdict: String,
    pub certified: bool,
    pub backend: Backend,
    pub witness_dim: Option<usize>,
    pub witness_basis: Option<Vec<Vec<String>>>,
    pub notes: Vec<String>,
}

impl StructureReport {
    pub fn summary(&self) -> StructureSummary {
        let (verdict, witness_dim, witness_basis) = match &self.verdict {
            Verdict::Irreducible => ("irreducible".to_string(), None, None),
            Verdict::Unknown => ("unknown".to_string(), None, None),
            Verdict::Reducible(w) => {
                let basis = match &w.basis_q {
                    Some(rows) => rows
                        .iter()
                        .map(|r| r.iter().map(|x| x.to_string()).collect())
                        .collect(),
                    None => w
                        .basis_f
                        .iter()
                        .map(|r| r.iter().map(|x| crate::pressure::sig17(*x)).collect())
                        .collect(),
                };
                ("reducible".to_string(), Some(w.dim()), Some(basis))
            }
        };
        StructureSummary {
            verdict,
            certified: self.certified,
            backend: self.backend,
            witness_dim,
            witness_basis,
            notes: self.notes.clone(),
        }
    }
}
