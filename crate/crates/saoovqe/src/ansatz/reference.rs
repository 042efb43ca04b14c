use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fermion::apply_ladders;
use crate::sim::{Gate, StateVector};

/// Input state fed to the ansatz.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ReferenceState {
    Hf,
    /// `−E_lh|HF⟩/√2`
    Cis { h: usize, l: usize },
    /// `cos φ·|HF⟩ + sin φ·CIS(h,l)` from the rotation circuit.
    Rotated { phi: f64, h: usize, l: usize },
}

/// Basis index of the closed-shell determinant.
pub fn hf_index(n_active: usize, n_elec: usize) -> usize {
    let nq = 2 * n_active;
    (0..n_elec).fold(0, |b, q| b | 1 << (nq - 1 - q))
}

fn check(n_active: usize, n_elec: usize) -> Result<()> {
    if n_elec % 2 != 0 || n_elec > 2 * n_active || n_active == 0 {
        return Err(Error::InvalidActiveSpace(format!(
            "{n_elec} electrons in {n_active} orbitals is not a closed shell"
        )));
    }
    Ok(())
}

fn check_pair(n_active: usize, n_elec: usize, h: usize, l: usize) -> Result<()> {
    let n_occ = n_elec / 2;
    if h >= n_occ || l < n_occ || l >= n_active {
        return Err(Error::InvalidParameter(format!(
            "(h, l) = ({h}, {l}) needs h occupied (< {n_occ}) and l virtual (< {n_active})"
        )));
    }
    Ok(())
}

/// Signs of the spin-up and spin-down components of `−E_lh|HF⟩/√2`, and
/// their basis indices.
fn cis_components(n_active: usize, n_elec: usize, h: usize, l: usize) -> [(usize, f64); 2] {
    let nq = 2 * n_active;
    let hf = hf_index(n_active, n_elec);
    let mut out = [(0, 0.0); 2];
    for (s, o) in out.iter_mut().enumerate() {
        let (b, sign) = apply_ladders(&[(2 * l + s, true), (2 * h + s, false)], nq, hf).expect("valid excitation");
        *o = (b, -sign);
    }
    out
}

/// Gate sequence preparing `Rotated{φ, h, l}` from `|0…0⟩`.
///
/// On qubits `a = 2h, b = 2h+1, c = 2l, d = 2l+1`: Ry(2φ) on a, X on b,
/// controlled-H a→d, CNOTs d→b, d→a, a→c, then X on a. Z gates on c and d
/// set the component signs. Remaining occupied qubits get an X.
pub fn rotation_circuit(phi: f64, h: usize, l: usize, n_active: usize, n_elec: usize) -> Result<Vec<Gate>> {
    check(n_active, n_elec)?;
    check_pair(n_active, n_elec, h, l)?;
    let (a, b, c, d) = (2 * h, 2 * h + 1, 2 * l, 2 * l + 1);
    let mut gates: Vec<Gate> = (0..n_elec).filter(|&q| q != a && q != b).map(Gate::x).collect();
    gates.extend([
        Gate::ry(a, 2.0 * phi),
        Gate::x(b),
        Gate::ch(a, d),
        Gate::cnot(d, b),
        Gate::cnot(d, a),
        Gate::cnot(a, c),
        Gate::x(a),
    ]);
    let [(_, up), (_, dn)] = cis_components(n_active, n_elec, h, l);
    if up < 0.0 {
        gates.push(Gate::z(c));
    }
    if dn < 0.0 {
        gates.push(Gate::z(d));
    }
    Ok(gates)
}

pub fn prepare_reference(kind: ReferenceState, n_active: usize, n_elec: usize) -> Result<StateVector> {
    check(n_active, n_elec)?;
    let nq = 2 * n_active;
    match kind {
        ReferenceState::Hf => Ok(StateVector::basis(nq, hf_index(n_active, n_elec))),
        ReferenceState::Cis { h, l } => {
            check_pair(n_active, n_elec, h, l)?;
            let mut amps = vec![Complex64::new(0.0, 0.0); 1 << nq];
            for (b, s) in cis_components(n_active, n_elec, h, l) {
                amps[b] = Complex64::new(s * std::f64::consts::FRAC_1_SQRT_2, 0.0);
            }
            StateVector::from_amplitudes(nq, amps)
        }
        ReferenceState::Rotated { phi, h, l } => {
            let mut s = StateVector::zero_state(nq);
            for g in rotation_circuit(phi, h, l, n_active, n_elec)? {
                s.apply_gate_mut(&g)?;
            }
            Ok(s)
        }
    }
}
