//! Circuit derivatives (analytic and parameter-shift), Hessian blocks,
//! coupled-perturbed solves, nuclear gradients and non-adiabatic couplings.

mod blocks;
mod counter;
mod cp;
mod gradient;
mod hamiltonian;
mod shift;

pub use blocks::{circuit_hessian, circuit_orbital_hessian, contract_rdms, rdm_derivatives, MeasurementCounts, NOMINAL_STRINGS};
pub use counter::{EvalCounter, EvalCounts};
pub use cp::{solve_coupled_perturbed, Multipliers, ResponseSystem, RhsKind, CP_NOISE_RESIDUAL, CP_RCOND};
pub use gradient::{
    analytic_gradient, analytic_nac, orbital_effective_rdms, BranchingVectors, ResponseContext, StateGradient, DEGENERATE_GAP,
};
pub use hamiltonian::{derivative_hamiltonians, hamiltonian_nuclear_derivative, DerivativeHamiltonian};
pub use shift::{shift_gradient, shift_hessian};
