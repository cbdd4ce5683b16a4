//! Gradient-free training of reversible Boolean models by amplitude amplification.
//!
//! The crate is split along the lines of the training pipeline:
//!
//! - [`boolcirc`]: Boolean model circuits, their classical evaluation, and compilation
//!   to reversible `{X, CNOT, MCX}` gate lists.
//! - [`datasets`]: the edge-detection and Tiny-MNIST benchmark datasets, IDX parsing,
//!   deterministic splits.
//! - [`amplify`]: accuracy tables, Grover planning, the closed-form evolution of the
//!   weight-register distribution under k parallel datasets, and the optimizer loop.
//! - [`statevec`]: a gate-level statevector simulator used as ground truth for
//!   [`amplify`].
//! - [`theory`]: query-complexity expressions and the optimal number of parallel
//!   datasets.

pub mod amplify;
pub mod bits;
pub mod boolcirc;
pub mod datasets;
mod error;
pub mod fmt;
pub mod statevec;
pub mod theory;

pub use bits::BitVector;
pub use error::{Error, Result};
