#![forbid(unsafe_code)]

//! Thermodynamic-formalism toolkit for tuples of invertible matrices.
//!
//! The crate computes singular value pressure with certified upper and lower
//! bounds, affinity dimension, structural classification of matrix tuples
//! (irreducibility, simultaneous block-triangularization, generalized
//! permutation form), and explicit equilibrium states for the tuple classes
//! where a finite construction exists (diagonal, generalized permutation,
//! and nonnegative lifts via Perron-Frobenius theory).
//!
//! Modules mirror the layering of the problem:
//!
//! * [`multilinear`] - dense small-matrix kernel: singular values, exterior
//!   powers, Hodge star, the singular value function.
//! * [`symbolic`]    - finite words over `{1,..,N}` and shift-invariant
//!   measures with exact cylinder evaluation.
//! * [`pressure`]    - partition sums, pressure bounds, affinity dimension.
//! * [`structure`]   - irreducibility and block structure of tuples.
//! * [`equilibrium`] - explicit equilibrium states and the 3D classification.
//! * [`dimension`]   - Lyapunov exponents/dimension and dimension-drop tests.

pub mod dimension;
pub mod equilibrium;
pub mod multilinear;
pub mod pressure;
pub mod structure;
pub mod symbolic;
pub mod tuple;

mod error;
mod perron;
mod scalar;

pub use error::{Error, Result};
pub use scalar::{parse_rational, rational_to_f64, Rational};
pub use tuple::{Backend, MatrixTuple};
