//! Stochastic Hamiltonian sparsification for randomized product formulas:
//! error bounds, probability optimization, gate-schedule compilation and
//! exact small-scale channel checks.

pub mod ansatz;
pub mod bounds;
pub mod channel;
pub mod error;
pub mod hamiltonian;
pub mod moments;
pub mod pauli;
pub mod schedule;
pub mod sweep;

pub use bounds::{BoundBreakdown, BoundMethod, ProbabilityAssignment};
pub use error::{Error, Result};
pub use hamiltonian::{HamTerm, HamiltonianSpec};
pub use pauli::PauliString;
