//! Exact statevector simulation.

mod pauli;
mod state;

pub use pauli::{Pauli, PauliString, PauliSum, SparseOperator};
pub use state::{
    apply_gate, apply_pauli_exponential, expectation, inner, sparse_expectation,
    transition_element, Gate, GateKind, StateVector,
};
