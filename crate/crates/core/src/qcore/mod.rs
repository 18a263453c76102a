//! Dense complex linear algebra over small Hilbert spaces: states, Hermitian
//! generators, projectors, eigendecomposition, and unitary evolution.
//!
//! All operations are pure functions of their inputs; every value is immutable
//! after construction and safe to share between threads.

pub mod eigen;
pub mod matrix;
pub mod ops;
pub mod random;
pub mod state;

/// Complex scalar underlying all amplitudes and matrix entries.
pub type C64 = num_complex::Complex64;

pub use eigen::{eig_hermitian, Eigensystem};
pub use matrix::{commutator_norm, commutes, Operator, OperatorKind, MAX_DIM, MIN_DIM};
pub use ops::{evolution_unitary, evolve, evolve_state, spectral_range, variance};
pub use random::{
    gue_hermitian, haar_projector, haar_state, haar_unitary, random_instance, seed_stream,
    RandomInstance,
};
pub use state::StateVector;
