use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::rdm::{measure_rdms, RdmSet, RdmTag};
use crate::ansatz::{enumerate_doubles_with, prepare_reference, Ansatz, GeneratorRule, Realization, ReferenceState};
use crate::error::{Error, Result};
use crate::fermion::ExcitationMaps;
use crate::response::{shift_gradient, EvalCounter};
use crate::sim::{SparseOperator, StateVector};

/// How circuit gradients are obtained.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GradientEngine {
    /// Exact derivative states from the circuit (any realization).
    #[default]
    Analytic,
    /// ±π/2 shifts per Pauli factor; `pauli_product` only.
    ParameterShift,
}

/// Weights and reference pair of the two-state ensemble.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EnsembleConfig {
    pub weights: [f64; 2],
    /// `None`: HF and the HOMO→LUMO singlet CIS state.
    pub references: Option<[ReferenceState; 2]>,
}

impl Default for EnsembleConfig {
    fn default() -> Self {
        EnsembleConfig { weights: [0.5, 0.5], references: None }
    }
}

impl EnsembleConfig {
    pub fn validate(&self) -> Result<()> {
        let [a, b] = self.weights;
        if a < 0.0 || b < 0.0 || ((a + b) - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParameter(format!("weights {a}, {b} must be non-negative and sum to 1")));
        }
        Ok(())
    }

    pub fn equal_weights(&self) -> bool {
        (self.weights[0] - self.weights[1]).abs() < 1e-12
    }

    pub fn reference_pair(&self, n_elec: usize) -> [ReferenceState; 2] {
        self.references.unwrap_or_else(|| {
            let homo = (n_elec / 2).saturating_sub(1);
            [ReferenceState::Hf, ReferenceState::Cis { h: homo, l: n_elec / 2 }]
        })
    }
}

/// Generator rule and realization of the circuit.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AnsatzConfig {
    pub rule: GeneratorRule,
    pub realization: Realization,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SaEnergy {
    pub sa: f64,
    pub a: f64,
    pub b: f64,
}

/// Ansatz, prepared references and weights for one active space.
#[derive(Clone, Debug)]
pub struct Ensemble {
    pub ansatz: Ansatz,
    pub references: [ReferenceState; 2],
    pub refs: [StateVector; 2],
    pub weights: [f64; 2],
    pub engine: GradientEngine,
    pub n_active: usize,
    pub n_elec: usize,
    pub maps: ExcitationMaps,
}

fn expect(op: &SparseOperator, v: &[Complex64]) -> f64 {
    op.sandwich(v, v).re
}

impl Ensemble {
    pub fn new(n_active: usize, n_elec: usize, cfg: &EnsembleConfig, ansatz: &AnsatzConfig, engine: GradientEngine) -> Result<Self> {
        cfg.validate()?;
        if engine == GradientEngine::ParameterShift && ansatz.realization != Realization::PauliProduct {
            return Err(Error::InvalidParameter("parameter_shift needs the pauli_product realization".into()));
        }
        let references = cfg.reference_pair(n_elec);
        let refs = [
            prepare_reference(references[0], n_active, n_elec)?,
            prepare_reference(references[1], n_active, n_elec)?,
        ];
        let set = enumerate_doubles_with(n_active, ansatz.rule)?;
        Ok(Ensemble {
            ansatz: Ansatz::new(set, ansatz.realization),
            references,
            refs,
            weights: cfg.weights,
            engine,
            n_active,
            n_elec,
            maps: ExcitationMaps::new(n_active),
        })
    }

    pub fn n_params(&self) -> usize {
        self.ansatz.n_params()
    }

    /// `U(θ)|Φ_A⟩`, `U(θ)|Φ_B⟩`.
    pub fn states(&self, theta: &[f64]) -> Result<[Vec<Complex64>; 2]> {
        Ok([
            self.ansatz.apply(theta, &self.refs[0])?.into_amplitudes(),
            self.ansatz.apply(theta, &self.refs[1])?.into_amplitudes(),
        ])
    }

    /// `E_X = ⟨Φ_X|U†HU|Φ_X⟩` (H includes `e_core`) and their weighted sum.
    pub fn sa_energy(&self, theta: &[f64], h: &SparseOperator) -> Result<SaEnergy> {
        let [a, b] = self.states(theta)?;
        let (ea, eb) = (expect(h, &a), expect(h, &b));
        Ok(SaEnergy { sa: self.weights[0] * ea + self.weights[1] * eb, a: ea, b: eb })
    }

    /// Energy and `∂E_SA/∂θ`.
    pub fn sa_gradient(&self, theta: &[f64], h: &SparseOperator, counter: Option<&EvalCounter>) -> Result<(SaEnergy, Vec<f64>)> {
        let e = self.sa_energy(theta, h)?;
        let mut g = vec![0.0; self.n_params()];
        for (k, r) in self.refs.iter().enumerate() {
            let gk = self.state_gradient(theta, r, h, counter)?;
            for (x, y) in g.iter_mut().zip(gk) {
                *x += self.weights[k] * y;
            }
        }
        Ok((e, g))
    }

    /// `∂⟨Φ|U†·op·U|Φ⟩/∂θ` for one reference.
    pub fn state_gradient(&self, theta: &[f64], reference: &StateVector, op: &SparseOperator, counter: Option<&EvalCounter>) -> Result<Vec<f64>> {
        match self.engine {
            GradientEngine::ParameterShift => shift_gradient(&self.ansatz, theta, reference, op, counter),
            GradientEngine::Analytic => {
                let (psi, d) = self.ansatz.derivatives(theta, reference)?;
                let hpsi = op.apply(&psi);
                Ok(d.iter()
                    .map(|dj| 2.0 * dj.iter().zip(&hpsi).map(|(a, b)| (a.conj() * b).re).sum::<f64>())
                    .collect())
            }
        }
    }

    /// Per-reference symmetrized RDMs at `θ`.
    pub fn state_rdms(&self, theta: &[f64]) -> Result<[RdmSet; 2]> {
        let [a, b] = self.states(theta)?;
        Ok([measure_rdms(&self.maps, &a, RdmTag::State(0))?, measure_rdms(&self.maps, &b, RdmTag::State(1))?])
    }

    pub fn sa_rdms(&self, theta: &[f64]) -> Result<RdmSet> {
        let [a, b] = self.state_rdms(theta)?;
        Ok(RdmSet::combine(&[(self.weights[0], &a), (self.weights[1], &b)], RdmTag::StateAveraged))
    }
}
