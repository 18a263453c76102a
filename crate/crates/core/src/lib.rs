//! Numerical toolkit for postselected quantum metrology on small Hilbert
//! spaces.
//!
//! The crate computes classical and quantum Fisher information, applies
//! projective postselection to evolved pure states, represents states by
//! doubly extended Kirkwood-Dirac quasiprobability distributions, and checks
//! the two structural facts that tie those together: commuting observables
//! cap the postselected Fisher information at the optimized-experiment value
//! (Δa)², and any anomalous value beyond that cap requires negativity in the
//! conditional quasiprobability distribution. Two explicit constructions with
//! divergent postselected Fisher information are included, together with
//! information-cost rate accounting for deciding when postselection pays.
//!
//! Everything is a pure function of immutable values; instances are safe to
//! share across threads and sweeps parallelize trivially.

pub mod costrate;
pub mod error;
pub mod fisher;
pub mod io;
pub mod kdq;
pub mod postselect;
pub mod protocols;
pub mod qcore;
pub mod tol;

pub use error::{Error, Result};
pub use qcore::{C64, Eigensystem, Operator, OperatorKind, StateVector};
