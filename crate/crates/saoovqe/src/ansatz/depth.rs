//! Circuit depth accounting.
//!
//! Two conventions are reported:
//!
//! - nominal: each parameter counts as four spin-orbital doubles
//!   (σ, τ ∈ {↑, ↓}), each compiled to eight four-qubit Pauli exponentials of
//!   depth 7 (three-CNOT ladder, Rz, ladder back). No Jordan-Wigner Z chains,
//!   no basis-change layers, no cancellation. For 12 parameters this is 2688.
//! - ASAP: the actual Pauli-product circuit, each exponential expanded into
//!   basis changes (H for X, Rx(π/2) for Y), a CNOT ladder over the support,
//!   Rz on the last support qubit and the mirror image, then layered as soon
//!   as every qubit a gate touches is free.

use serde::Serialize;

use super::Ansatz;
use crate::sim::{Gate, Pauli, PauliString};

/// Name and qubits of one gate, enough to layer it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GateFootprint {
    pub name: &'static str,
    pub qubits: Vec<usize>,
}

impl From<&Gate> for GateFootprint {
    fn from(g: &Gate) -> Self {
        use crate::sim::GateKind::*;
        let name = match g.kind {
            X => "x",
            Z => "z",
            H => "h",
            Ry(_) => "ry",
            Cnot => "cx",
            ControlledH => "ch",
            ControlledRy(_) => "cry",
        };
        let mut qubits: Vec<usize> = g.control.into_iter().collect();
        qubits.push(g.target);
        GateFootprint { name, qubits }
    }
}

/// Gates realizing `exp(−iαP/2)` for one Pauli string.
pub fn pauli_exponential_gates(p: &PauliString) -> Vec<GateFootprint> {
    let support = p.support();
    if support.is_empty() {
        return Vec::new();
    }
    let g = |name, qubits: Vec<usize>| GateFootprint { name, qubits };
    let mut basis = Vec::new();
    let mut unbasis = Vec::new();
    for &q in &support {
        match p.get(q) {
            Pauli::X => {
                basis.push(g("h", vec![q]));
                unbasis.push(g("h", vec![q]));
            }
            Pauli::Y => {
                basis.push(g("rx", vec![q]));
                unbasis.push(g("rx", vec![q]));
            }
            _ => {}
        }
    }
    let ladder: Vec<GateFootprint> = support.windows(2).map(|w| g("cx", vec![w[0], w[1]])).collect();
    let mut out = basis;
    out.extend(ladder.iter().cloned());
    out.push(g("rz", vec![*support.last().unwrap()]));
    out.extend(ladder.into_iter().rev());
    out.extend(unbasis);
    out
}

/// Layered depth with every gate placed in the earliest free layer.
pub fn asap_depth(n_qubits: usize, gates: &[GateFootprint]) -> usize {
    let mut level = vec![0usize; n_qubits];
    let mut depth = 0;
    for gate in gates {
        let l = gate.qubits.iter().map(|&q| level[q]).max().unwrap_or(0) + 1;
        for &q in &gate.qubits {
            level[q] = l;
        }
        depth = depth.max(l);
    }
    depth
}

/// Nominal count: params × 4 spin blocks × 8 strings × 7 layers.
pub fn nominal_depth(n_params: usize) -> usize {
    n_params * 4 * 8 * 7
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DepthReport {
    pub n_params: usize,
    pub n_pauli_factors: usize,
    pub nominal: usize,
    pub asap: usize,
    pub gate_count: usize,
}

impl Ansatz {
    pub fn depth_report(&self) -> DepthReport {
        let gates: Vec<GateFootprint> =
            self.pauli_factors().iter().flat_map(|(_, _, p)| pauli_exponential_gates(p)).collect();
        DepthReport {
            n_params: self.n_params(),
            n_pauli_factors: self.pauli_factors().len(),
            nominal: nominal_depth(self.n_params()),
            asap: asap_depth(self.n_qubits(), &gates),
            gate_count: gates.len(),
        }
    }
}
