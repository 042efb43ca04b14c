//! GUCCD generators, the ansatz circuit and reference states.
//!
//! A generator is `G = e_tuvw − e_utwv` with
//! `e_tuvw = Σ_στ a†_tσ a†_vτ a_wτ a_uσ`. Its Jordan-Wigner image is a sum of
//! Pauli strings with purely imaginary coefficients.

mod circuit;
mod depth;
mod reference;

pub use circuit::{Ansatz, Realization};
pub use depth::{asap_depth, nominal_depth, pauli_exponential_gates, DepthReport, GateFootprint};
pub use reference::{hf_index, prepare_reference, rotation_circuit, ReferenceState};

use crate::error::{Error, Result};
use crate::fermion::{jordan_wigner, spin_free_pair_excitation, FermionOperator};
use crate::sim::{PauliString, PauliSum, SparseOperator};

/// How generator index tuples are enumerated.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GeneratorRule {
    /// Sorted index multisets `t ≤ v ≤ w ≤ u`, `t ≠ u`, giving the
    /// generator `e_tuvw − e_utwv`. Twelve parameters for three orbitals.
    #[default]
    SortedMultisets,
    /// One generator per orbit of `(t,u,v,w)` under pair exchange and
    /// adjoint, dropping those that vanish. Eighteen for three orbitals.
    PairExchangeOrbits,
}

/// One anti-Hermitian spin-free double generator.
#[derive(Clone, Debug)]
pub struct Generator {
    pub indices: [usize; 4],
    pub fermion: FermionOperator,
    /// Qubit image; coefficients are imaginary.
    pub pauli: PauliSum,
    pub sparse: SparseOperator,
}

impl Generator {
    fn new(n_active: usize, t: usize, u: usize, v: usize, w: usize) -> Result<Option<Self>> {
        let e = spin_free_pair_excitation(n_active, t, u, v, w)?;
        let mut fermion = e.add(&e.adjoint().scale(-1.0));
        fermion.simplify(1e-14);
        let pauli = jordan_wigner(&fermion);
        if pauli.is_empty() {
            return Ok(None);
        }
        let sparse = pauli.to_sparse();
        Ok(Some(Generator { indices: [t, u, v, w], fermion, pauli, sparse }))
    }

    /// Pauli factors `(c, P)` with `G = Σ i·c·P`, in canonical string order.
    pub fn factors(&self) -> Vec<(f64, PauliString)> {
        let mut f: Vec<(f64, PauliString)> = self.pauli.terms().map(|(s, c)| (c.im, *s)).collect();
        f.sort_by_key(|(_, s)| s.to_string());
        f
    }

    pub fn n_strings(&self) -> usize {
        self.pauli.len()
    }

    /// Largest deviation of the qubit image from anti-Hermiticity.
    pub fn anti_hermitian_error(&self) -> f64 {
        self.pauli.add(&self.pauli.adjoint()).max_abs()
    }
}

/// Parameter index map for one active space.
#[derive(Clone, Debug)]
pub struct GeneratorSet {
    pub n_active: usize,
    pub generators: Vec<Generator>,
}

impl GeneratorSet {
    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    pub fn n_qubits(&self) -> usize {
        2 * self.n_active
    }

    pub fn labels(&self) -> Vec<String> {
        self.generators
            .iter()
            .map(|g| format!("{}{}{}{}", g.indices[0], g.indices[1], g.indices[2], g.indices[3]))
            .collect()
    }
}

pub fn enumerate_doubles(n_active: usize) -> Result<GeneratorSet> {
    enumerate_doubles_with(n_active, GeneratorRule::default())
}

pub fn enumerate_doubles_with(n_active: usize, rule: GeneratorRule) -> Result<GeneratorSet> {
    if n_active < 2 {
        return Err(Error::InvalidActiveSpace(format!("GUCCD needs at least 2 active orbitals, got {n_active}")));
    }
    let n = n_active;
    let mut generators = Vec::new();
    match rule {
        GeneratorRule::SortedMultisets => {
            for t in 0..n {
                for v in t..n {
                    for w in v..n {
                        for u in w..n {
                            if t == u {
                                continue;
                            }
                            if let Some(g) = Generator::new(n, t, u, v, w)? {
                                generators.push(g);
                            }
                        }
                    }
                }
            }
        }
        GeneratorRule::PairExchangeOrbits => {
            let mut seen = std::collections::HashSet::new();
            for t in 0..n {
                for u in 0..n {
                    for v in 0..n {
                        for w in 0..n {
                            let orbit = [[t, u, v, w], [v, w, t, u], [u, t, w, v], [w, v, u, t]];
                            if orbit.iter().any(|o| seen.contains(o)) {
                                continue;
                            }
                            seen.extend(orbit);
                            if let Some(g) = Generator::new(n, t, u, v, w)? {
                                generators.push(g);
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(GeneratorSet { n_active, generators })
}

/// Pauli image of one spin-orbital double `a†_i a†_j a_k a_l − h.c.`.
pub fn spin_orbital_double(n_qubits: usize, i: usize, j: usize, k: usize, l: usize) -> Result<PauliSum> {
    let e = FermionOperator::from_product(n_qubits, &[(i, true), (j, true), (k, false), (l, false)], 1.0)?;
    Ok(jordan_wigner(&e.add(&e.adjoint().scale(-1.0))))
}
