//! State-averaged orbital-optimized VQE (SA-OO-VQE) on an exact statevector
//! simulator, with analytic nuclear gradients, non-adiabatic couplings and
//! conical-intersection drivers.
//!
//! Module map:
//! - [`sim`]: Pauli strings and sums, statevectors, gates, Pauli exponentials.
//! - [`fermion`]: fermionic operators, Jordan-Wigner images, active-space
//!   Hamiltonians and the exact-diagonalization oracle.
//! - [`integrals`]: integral containers, FCIDUMP/DERIVDUMP files, AO to MO
//!   transforms, frozen-core folding and built-in model systems.
//! - [`ansatz`]: GUCCD generators, circuits and reference-state preparation.
//! - [`savqe`]: state-averaged energy, RDMs, circuit optimization, the
//!   SA-OO-VQE driver and state resolution.
//! - [`orbital`]: generalized Fock matrices, orbital gradient/Hessian and
//!   Newton steps.
//! - [`response`]: circuit derivatives, coupled-perturbed equations, analytic
//!   gradients and non-adiabatic couplings.
//! - [`geometry`]: formaldimine geometry, scans, CI and MECI searches.
//! - [`config`]: the JSON run configuration.

pub mod ansatz;
pub mod config;
pub mod error;
pub mod fermion;
pub mod geometry;
pub mod integrals;
pub mod linalg;
pub mod orbital;
pub mod response;
pub mod savqe;
pub mod sim;

pub use error::{Error, Result};
