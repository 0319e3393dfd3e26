//! Dense-matrix laboratory for decoherence-free subspaces, noiseless
//! subsystems, and dynamical decoupling on small qubit systems coupled to
//! finite-dimensional baths.
//!
//! Everything is desk-scale: states and operators are dense complex matrices
//! of total dimension at most 4096 (6 system qubits times a bath of dimension
//! 64). All values are immutable after construction and all operations are
//! pure functions, so they can be freely shared across threads.

pub mod algebra;
pub mod codes;
pub mod dd;
pub mod linalg;
pub mod models;

pub use linalg::{ComplexMatrix, DensityMatrix, StateVector, TensorLayout, C64};
