use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::operator::{
    apply_ladders, jordan_wigner, spin_free_excitation, spin_free_pair_excitation, FermionOperator, Ladder,
};
use crate::error::{Error, Result};
use crate::linalg::{sym_eigen, Tensor4};
use crate::sim::{PauliSum, SparseOperator, StateVector};

/// Active-space electronic Hamiltonian
/// H = Σ h_pq E_pq + ½ Σ (pq|rs) e_pqrs + e_core.
#[derive(Clone, Debug)]
pub struct ActiveHamiltonian {
    pub h_eff: DMatrix<f64>,
    pub g_act: Tensor4,
    pub e_core: f64,
    pub n_active: usize,
    pub n_elec_active: usize,
}

impl ActiveHamiltonian {
    pub fn new(h_eff: DMatrix<f64>, g_act: Tensor4, e_core: f64, n_elec_active: usize) -> Result<Self> {
        let n = h_eff.nrows();
        if h_eff.ncols() != n || g_act.dim() != n {
            return Err(Error::DimensionMismatch(format!(
                "h is {}x{}, g has extent {}",
                h_eff.nrows(),
                h_eff.ncols(),
                g_act.dim()
            )));
        }
        if n_elec_active > 2 * n {
            return Err(Error::InvalidActiveSpace(format!(
                "{n_elec_active} electrons do not fit in {n} orbitals"
            )));
        }
        Ok(ActiveHamiltonian { h_eff, g_act, e_core, n_active: n, n_elec_active })
    }

    pub fn n_qubits(&self) -> usize {
        2 * self.n_active
    }

    /// Largest asymmetry of h and of the 8-fold symmetry of g.
    pub fn symmetry_error(&self) -> f64 {
        let hs = (&self.h_eff - self.h_eff.transpose()).amax();
        hs.max(self.g_act.sym8_error())
    }

    /// Electronic part as a normal-ordered fermion operator (no e_core).
    pub fn fermion_operator(&self) -> FermionOperator {
        let n = self.n_active;
        let mut op = FermionOperator::zero(2 * n);
        for p in 0..n {
            for q in 0..n {
                let h = self.h_eff[(p, q)];
                if h != 0.0 {
                    op = op.add(&spin_free_excitation(n, p, q).expect("in range").scale(h));
                }
            }
        }
        for p in 0..n {
            for q in 0..n {
                for r in 0..n {
                    for s in 0..n {
                        let g = self.g_act[[p, q, r, s]];
                        if g != 0.0 {
                            op = op.add(
                                &spin_free_pair_excitation(n, p, q, r, s).expect("in range").scale(0.5 * g),
                            );
                        }
                    }
                }
            }
        }
        op
    }

    /// Qubit image including `e_core` on the identity string.
    pub fn qubit_operator(&self) -> PauliSum {
        let mut ps = jordan_wigner(&self.fermion_operator());
        ps.add_term(
            crate::sim::PauliString::identity(self.n_qubits()),
            Complex64::new(self.e_core, 0.0),
        );
        ps.simplify(1e-14);
        ps
    }

    /// Sparse matrix over the full register, built from the ladder action of
    /// every spin-orbital term; includes `e_core`.
    pub fn sparse(&self) -> SparseOperator {
        let nq = self.n_qubits();
        let terms = self.spin_orbital_terms();
        let dim = 1usize << nq;
        let cols: Vec<Vec<(usize, Complex64)>> = (0..dim)
            .map(|b| {
                let mut col = vec![(b, Complex64::new(self.e_core, 0.0))];
                for (ops, c) in &terms {
                    if let Some((b2, s)) = apply_ladders(ops, nq, b) {
                        col.push((b2, Complex64::new(c * s, 0.0)));
                    }
                }
                col
            })
            .collect();
        SparseOperator::from_columns(nq, cols)
    }

    fn spin_orbital_terms(&self) -> Vec<(Vec<Ladder>, f64)> {
        let n = self.n_active;
        let mut terms = Vec::new();
        for p in 0..n {
            for q in 0..n {
                let h = self.h_eff[(p, q)];
                if h == 0.0 {
                    continue;
                }
                for a in 0..2 {
                    terms.push((vec![(2 * p + a, true), (2 * q + a, false)], h));
                }
            }
        }
        for p in 0..n {
            for q in 0..n {
                for r in 0..n {
                    for s in 0..n {
                        let g = self.g_act[[p, q, r, s]];
                        if g == 0.0 {
                            continue;
                        }
                        for a in 0..2 {
                            for b in 0..2 {
                                terms.push((
                                    vec![(2 * p + a, true), (2 * r + b, true), (2 * s + b, false), (2 * q + a, false)],
                                    0.5 * g,
                                ));
                            }
                        }
                    }
                }
            }
        }
        terms
    }

    /// Dense real matrix on the listed basis indices (electronic + e_core).
    pub fn sector_matrix(&self, basis: &[usize]) -> DMatrix<f64> {
        let nq = self.n_qubits();
        let pos: std::collections::HashMap<usize, usize> =
            basis.iter().enumerate().map(|(i, &b)| (b, i)).collect();
        let terms = self.spin_orbital_terms();
        let mut m = DMatrix::identity(basis.len(), basis.len()) * self.e_core;
        for (j, &b) in basis.iter().enumerate() {
            for (ops, c) in &terms {
                if let Some((b2, s)) = apply_ladders(ops, nq, b) {
                    if let Some(&i) = pos.get(&b2) {
                        m[(i, j)] += c * s;
                    }
                }
            }
        }
        m
    }
}

/// Basis indices with `n_elec` set bits and equal α/β counts (S_z = 0 when
/// `n_elec` is even, S_z = ½ otherwise). α modes are the even qubits.
pub fn sector_basis(n_qubits: usize, n_elec: usize) -> Vec<usize> {
    let alpha_mask: usize = (0..n_qubits)
        .filter(|q| q % 2 == 0)
        .map(|q| 1usize << (n_qubits - 1 - q))
        .sum();
    let n_alpha = n_elec.div_ceil(2);
    (0..1usize << n_qubits)
        .filter(|&b| b.count_ones() as usize == n_elec && (b & alpha_mask).count_ones() as usize == n_alpha)
        .collect()
}

fn lift(n_qubits: usize, basis: &[usize], v: &[f64]) -> StateVector {
    let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n_qubits];
    for (&b, &x) in basis.iter().zip(v) {
        amps[b] = Complex64::new(x, 0.0);
    }
    StateVector::from_amplitudes(n_qubits, amps).expect("length matches")
}

/// Lowest eigenpairs in the particle-number / S_z sector, ascending.
pub fn exact_subspace_oracle(h: &ActiveHamiltonian, n_states: usize) -> Result<Vec<(f64, StateVector)>> {
    if h.n_active > 8 {
        return Err(Error::InvalidActiveSpace(format!(
            "{} active orbitals exceed the dense limit of 8",
            h.n_active
        )));
    }
    let nq = h.n_qubits();
    let basis = sector_basis(nq, h.n_elec_active);
    if basis.is_empty() {
        return Err(Error::EmptySector(format!("N = {}", h.n_elec_active)));
    }
    if n_states > basis.len() {
        return Err(Error::TooManyStates { requested: n_states, available: basis.len() });
    }
    let (vals, vecs) = sym_eigen(&h.sector_matrix(&basis));
    Ok((0..n_states)
        .map(|k| (vals[k], lift(nq, &basis, vecs.column(k).as_slice())))
        .collect())
}

/// As [`exact_subspace_oracle`] but restricted to spin eigenstates with
/// S(S+1) = `s2`, by diagonalizing H inside the S² eigenspace.
pub fn exact_spin_oracle(h: &ActiveHamiltonian, n_states: usize, s2: f64) -> Result<Vec<(f64, StateVector)>> {
    let nq = h.n_qubits();
    let basis = sector_basis(nq, h.n_elec_active);
    if basis.is_empty() {
        return Err(Error::EmptySector(format!("N = {}", h.n_elec_active)));
    }
    let s2_op = super::operator::s_squared(h.n_active);
    let pos: std::collections::HashMap<usize, usize> =
        basis.iter().enumerate().map(|(i, &b)| (b, i)).collect();
    let mut s2m = DMatrix::zeros(basis.len(), basis.len());
    for (j, &b) in basis.iter().enumerate() {
        for (b2, c) in s2_op.apply_to_basis(b) {
            if let Some(&i) = pos.get(&b2) {
                s2m[(i, j)] += c;
            }
        }
    }
    let (svals, svecs) = sym_eigen(&s2m);
    let cols: Vec<usize> = (0..basis.len()).filter(|&k| (svals[k] - s2).abs() < 1e-8).collect();
    if cols.is_empty() {
        return Err(Error::EmptySector(format!("S(S+1) = {s2}")));
    }
    if n_states > cols.len() {
        return Err(Error::TooManyStates { requested: n_states, available: cols.len() });
    }
    let p = DMatrix::from_fn(basis.len(), cols.len(), |i, k| svecs[(i, cols[k])]);
    let hm = h.sector_matrix(&basis);
    let hp = p.transpose() * hm * &p;
    let (vals, vecs) = sym_eigen(&hp);
    Ok((0..n_states)
        .map(|k| {
            let v: DVector<f64> = &p * vecs.column(k);
            (vals[k], lift(nq, &basis, v.as_slice()))
        })
        .collect())
}
