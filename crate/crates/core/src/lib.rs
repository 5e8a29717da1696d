//! Sparse approximate convex decompositions of matrices and tensors.
//!
//! The crate is organised bottom-up:
//!
//! - [`tensor`]: dense complex matrices, nonnegative tensors, Schatten and
//!   entrywise norms, SVD and the directional derivatives of those norms.
//! - [`wsc`]: weighted simplicial complexes and group actions on them.
//! - [`decomp`]: `(Ω,G)`-decompositions, their evaluation, symmetrization
//!   and the diagonal correspondence between tensors and psd matrices.
//! - [`caratheodory`]: the deterministic approximate Carathéodory solver
//!   with ordered and greedy atom selection, plus its error/budget bounds.
//! - [`gauge`]: gauge-function estimates and approximate-rank budgets.
//! - [`experiment`]: instance builders, experiment runner, separation scans
//!   and SVG rendering used by the command line tool.

pub mod caratheodory;
pub mod decomp;
mod error;
pub mod experiment;
pub mod gauge;
pub mod par;
pub mod tensor;
pub mod wsc;

pub use error::{Error, Result};
pub use num_complex::Complex64;
