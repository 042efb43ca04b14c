use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::pauli::{PauliString, PauliSum, SparseOperator};
use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum GateKind {
    X,
    Z,
    H,
    Ry(f64),
    Cnot,
    ControlledH,
    ControlledRy(f64),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Gate {
    pub kind: GateKind,
    pub target: usize,
    pub control: Option<usize>,
}

impl Gate {
    pub fn x(q: usize) -> Self {
        Gate { kind: GateKind::X, target: q, control: None }
    }
    pub fn z(q: usize) -> Self {
        Gate { kind: GateKind::Z, target: q, control: None }
    }
    pub fn h(q: usize) -> Self {
        Gate { kind: GateKind::H, target: q, control: None }
    }
    pub fn ry(q: usize, angle: f64) -> Self {
        Gate { kind: GateKind::Ry(angle), target: q, control: None }
    }
    pub fn cnot(control: usize, target: usize) -> Self {
        Gate { kind: GateKind::Cnot, target, control: Some(control) }
    }
    pub fn ch(control: usize, target: usize) -> Self {
        Gate { kind: GateKind::ControlledH, target, control: Some(control) }
    }
    pub fn cry(control: usize, target: usize, angle: f64) -> Self {
        Gate { kind: GateKind::ControlledRy(angle), target, control: Some(control) }
    }

    /// 2×2 matrix acting on the target (the controlled block for two-qubit gates).
    pub fn target_matrix(&self) -> [[Complex64; 2]; 2] {
        let r = |v: f64| Complex64::new(v, 0.0);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        match self.kind {
            GateKind::X | GateKind::Cnot => [[r(0.0), r(1.0)], [r(1.0), r(0.0)]],
            GateKind::Z => [[r(1.0), r(0.0)], [r(0.0), r(-1.0)]],
            GateKind::H | GateKind::ControlledH => [[r(s), r(s)], [r(s), r(-s)]],
            GateKind::Ry(a) | GateKind::ControlledRy(a) => {
                let (sn, c) = (a / 2.0).sin_cos();
                [[r(c), r(-sn)], [r(sn), r(c)]]
            }
        }
    }

    /// Dense matrix on (target) or (control, target), basis ordered with the
    /// first listed qubit as the high bit.
    pub fn dense(&self) -> DMatrix<Complex64> {
        let u = self.target_matrix();
        match self.control {
            None => DMatrix::from_fn(2, 2, |i, j| u[i][j]),
            Some(_) => {
                let mut m = DMatrix::identity(4, 4);
                for i in 0..2 {
                    for j in 0..2 {
                        m[(2 + i, 2 + j)] = u[i][j];
                    }
                }
                m
            }
        }
    }
}

/// Normalized amplitude vector; basis index bit `n-1-q` is qubit `q`.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    pub fn zero_state(n_qubits: usize) -> Self {
        StateVector::basis(n_qubits, 0)
    }

    pub fn basis(n_qubits: usize, index: usize) -> Self {
        let mut amps = vec![ZERO; 1 << n_qubits];
        amps[index] = Complex64::new(1.0, 0.0);
        StateVector { n_qubits, amps }
    }

    /// Basis state from a ket label such as `"1100"` (qubit 0 first).
    pub fn from_bits(label: &str) -> Result<Self> {
        let n = label.len();
        let mut idx = 0usize;
        for c in label.chars() {
            idx <<= 1;
            match c {
                '0' => {}
                '1' => idx |= 1,
                other => return Err(Error::Format(format!("bad ket character `{other}`"))),
            }
        }
        Ok(StateVector::basis(n, idx))
    }

    /// Wrap raw amplitudes; the caller guarantees normalization.
    pub fn from_amplitudes(n_qubits: usize, amps: Vec<Complex64>) -> Result<Self> {
        if amps.len() != 1 << n_qubits {
            return Err(Error::DimensionMismatch(format!(
                "{} amplitudes for {n_qubits} qubits",
                amps.len()
            )));
        }
        Ok(StateVector { n_qubits, amps })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amps
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn normalize(&mut self) {
        let n = self.norm_sqr().sqrt();
        if n > 0.0 {
            self.amps.iter_mut().for_each(|a| *a /= n);
        }
    }

    pub fn to_dvector(&self) -> DVector<Complex64> {
        DVector::from_column_slice(&self.amps)
    }

    /// Ket label of basis index `b`.
    pub fn label(n_qubits: usize, b: usize) -> String {
        (0..n_qubits)
            .map(|q| if b >> (n_qubits - 1 - q) & 1 == 1 { '1' } else { '0' })
            .collect()
    }

    fn check_qubit(&self, q: usize) -> Result<()> {
        if q >= self.n_qubits {
            Err(Error::QubitOutOfRange { index: q, n_qubits: self.n_qubits })
        } else {
            Ok(())
        }
    }

    fn check_same(&self, n: usize) -> Result<()> {
        if n != self.n_qubits {
            Err(Error::QubitCountMismatch { expected: self.n_qubits, found: n })
        } else {
            Ok(())
        }
    }

    pub fn apply_gate_mut(&mut self, gate: &Gate) -> Result<()> {
        self.check_qubit(gate.target)?;
        let cmask = match gate.control {
            Some(c) => {
                self.check_qubit(c)?;
                if c == gate.target {
                    return Err(Error::ControlEqualsTarget(c));
                }
                1usize << (self.n_qubits - 1 - c)
            }
            None => 0,
        };
        let t = 1usize << (self.n_qubits - 1 - gate.target);
        let u = gate.target_matrix();
        for b in 0..self.amps.len() {
            if b & t != 0 || b & cmask != cmask {
                continue;
            }
            let (a0, a1) = (self.amps[b], self.amps[b | t]);
            self.amps[b] = u[0][0] * a0 + u[0][1] * a1;
            self.amps[b | t] = u[1][0] * a0 + u[1][1] * a1;
        }
        Ok(())
    }

    pub fn apply_gate(&self, gate: &Gate) -> Result<StateVector> {
        let mut out = self.clone();
        out.apply_gate_mut(gate)?;
        Ok(out)
    }

    /// `|ψ⟩ ← exp(-i·angle/2·P)|ψ⟩`.
    pub fn apply_pauli_exponential_mut(&mut self, p: &PauliString, angle: f64) -> Result<()> {
        self.check_same(p.n_qubits())?;
        let (s, c) = (angle / 2.0).sin_cos();
        let mis = Complex64::new(0.0, -s);
        if p.x_mask() == 0 {
            // diagonal: P|b⟩ = ±|b⟩
            for (b, a) in self.amps.iter_mut().enumerate() {
                let (_, ph) = p.act(b);
                *a *= Complex64::new(c, 0.0) + mis * ph;
            }
            return Ok(());
        }
        let x = p.x_mask() as usize;
        let top = 1usize << (63 - (x as u64).leading_zeros());
        for b in 0..self.amps.len() {
            if b & top != 0 {
                continue;
            }
            let b2 = b ^ x;
            let (_, ph1) = p.act(b); // P|b⟩ = ph1 |b2⟩
            let (_, ph2) = p.act(b2); // P|b2⟩ = ph2 |b⟩
            let (a, a2) = (self.amps[b], self.amps[b2]);
            self.amps[b] = c * a + mis * ph2 * a2;
            self.amps[b2] = c * a2 + mis * ph1 * a;
        }
        Ok(())
    }

    pub fn apply_pauli_exponential(&self, p: &PauliString, angle: f64) -> Result<StateVector> {
        let mut out = self.clone();
        out.apply_pauli_exponential_mut(p, angle)?;
        Ok(out)
    }

    /// `P|ψ⟩` (not normalized-preserving in general for sums).
    pub fn apply_pauli_string(&self, p: &PauliString) -> Result<Vec<Complex64>> {
        self.check_same(p.n_qubits())?;
        let mut out = vec![ZERO; self.amps.len()];
        for (b, a) in self.amps.iter().enumerate() {
            let (t, ph) = p.act(b);
            out[t] += ph * a;
        }
        Ok(out)
    }

    pub fn apply_sum(&self, op: &PauliSum) -> Result<Vec<Complex64>> {
        self.check_same(op.n_qubits())?;
        let mut out = vec![ZERO; self.amps.len()];
        for (s, c) in op.terms() {
            for (b, a) in self.amps.iter().enumerate() {
                let (t, ph) = s.act(b);
                out[t] += c * ph * a;
            }
        }
        Ok(out)
    }

    pub fn inner(&self, other: &StateVector) -> Result<Complex64> {
        self.check_same(other.n_qubits)?;
        Ok(inner(&self.amps, &other.amps))
    }
}

pub fn inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub fn apply_gate(state: &StateVector, gate: &Gate) -> Result<StateVector> {
    state.apply_gate(gate)
}

pub fn apply_pauli_exponential(state: &StateVector, p: &PauliString, angle: f64) -> Result<StateVector> {
    state.apply_pauli_exponential(p, angle)
}

/// `⟨bra|op|ket⟩`.
pub fn transition_element(bra: &StateVector, op: &PauliSum, ket: &StateVector) -> Result<Complex64> {
    bra.check_same(ket.n_qubits)?;
    bra.check_same(op.n_qubits())?;
    let mut acc = ZERO;
    for (s, c) in op.terms() {
        let mut t = ZERO;
        for (b, a) in ket.amps.iter().enumerate() {
            if a.re == 0.0 && a.im == 0.0 {
                continue;
            }
            let (r, ph) = s.act(b);
            t += bra.amps[r].conj() * ph * a;
        }
        acc += c * t;
    }
    Ok(acc)
}

/// `⟨ψ|op|ψ⟩`; for Hermitian sums the imaginary part is rounding noise.
pub fn expectation(state: &StateVector, op: &PauliSum) -> Result<Complex64> {
    transition_element(state, op, state)
}

/// Real expectation of a Hermitian operator via its sparse form.
pub fn sparse_expectation(state: &StateVector, op: &SparseOperator) -> Result<f64> {
    state.check_same(op.n_qubits())?;
    Ok(op.sandwich(&state.amps, &state.amps).re)
}
