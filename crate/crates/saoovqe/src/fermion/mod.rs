//! Fermionic operators, the Jordan-Wigner map and active-space Hamiltonians.
//!
//! Spin orbitals are interleaved: qubit `2p` is orbital `p` spin up, qubit
//! `2p+1` spin down.

mod excitations;
mod hamiltonian;
mod operator;

pub use excitations::ExcitationMaps;
pub use hamiltonian::{exact_spin_oracle, exact_subspace_oracle, sector_basis, ActiveHamiltonian};
pub use operator::{
    apply_ladders, jordan_wigner, number_operator, s_squared, s_z, spin_free_excitation,
    spin_free_pair_excitation, FermionOperator, Ladder,
};
