//! Explicit equilibrium states for the tuple classes where a finite
//! construction exists, and the full 3D classification pipeline.
//!
//! The central device is the nonnegative lift of a generalized permutation
//! tuple: a semigroup homomorphism into higher-dimensional nonnegative
//! matrices whose operator norm reproduces the singular value function.
//! Norm-equilibrium states of nonnegative tuples are Perron-Gibbs measures
//! on the maximal strongly connected components of the summed support, so
//! the lift turns the equilibrium problem into finite Perron-Frobenius
//! computations.

mod classify;
mod lift;
mod oracle;
mod reducible3d;
mod states;
mod summary;

pub use classify::{classify3d, ClassifyOpts, EquilibriumReport, Route};
pub use lift::{permutation_lift, wedge_abs_lift, LiftedTuple};
pub use oracle::{affinity_dimension_auto, PressureOracle};
pub use reducible3d::{reducible3d_pressure, word_identity_values, Reducible3dReport};
pub use states::{
    diagonal_equilibria, gibbs_check, gibbs_check_lift, nonneg_equilibria, GibbsCheck, GibbsData,
    NonnegEquilibria, StateReport,
};
pub use summary::{EquilibriumSummary, StateSummary};

use crate::structure::BlockTriangularization;
use crate::tuple::MatrixTuple;
use crate::Result;

/// Zero the off-diagonal blocks of a triangularized tuple; the equilibrium
/// states (and the pressure) of the block-diagonal tuple are the same as
/// those of the original.
pub fn block_diagonal_reduce(
    tuple: &MatrixTuple,
    tri: &BlockTriangularization,
) -> Result<MatrixTuple> {
    crate::structure::block_diagonal_tuple(tuple, tri)
}
