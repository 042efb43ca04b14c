use std::f64::consts::FRAC_PI_2;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use super::{shift_hessian, EvalCounter, EvalCounts};
use crate::error::Result;
use crate::integrals::{MoIntegrals, Partition};
use crate::orbital::{generalized_fock, orbital_gradient, PairMask};
use crate::savqe::{complete_rdms, measure_transition_rdms, Ensemble, GradientEngine, RdmSet, RdmTag};
use crate::sim::SparseOperator;

/// Pauli strings per generator in the nominal counting convention (one
/// spin-orbital double excitation).
pub const NOMINAL_STRINGS: usize = 8;

fn re_dot(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x.conj() * y).re).sum()
}

/// `∂R^SA/∂θ_j` for every parameter, symmetrized, zero overlap.
pub fn rdm_derivatives(ens: &Ensemble, theta: &[f64], counter: Option<&EvalCounter>) -> Result<Vec<RdmSet>> {
    let n = ens.n_params();
    let mut out: Vec<RdmSet> = (0..n).map(|j| RdmSet::zeros(ens.n_active, RdmTag::Derivative(j))).collect();
    for (k, r) in ens.refs.iter().enumerate() {
        let w = ens.weights[k];
        match ens.engine {
            GradientEngine::Analytic => {
                let (psi, d) = ens.ansatz.derivatives(theta, r)?;
                for (j, dj) in d.iter().enumerate() {
                    let a = measure_transition_rdms(&ens.maps, dj, &psi, RdmTag::Derivative(j))?;
                    let b = measure_transition_rdms(&ens.maps, &psi, dj, RdmTag::Derivative(j))?;
                    out[j].gamma += (&a.gamma + &b.gamma) * w;
                    out[j].big_gamma.add_scaled(&a.big_gamma, w);
                    out[j].big_gamma.add_scaled(&b.big_gamma, w);
                }
            }
            GradientEngine::ParameterShift => {
                let factors = ens.ansatz.pauli_factors();
                for (x, (j, wx, _)) in factors.iter().enumerate() {
                    for (sign, s) in [(1.0, FRAC_PI_2), (-1.0, -FRAC_PI_2)] {
                        let v = ens.ansatz.apply_shifted(theta, r, &[(x, s)])?;
                        let a = v.amplitudes();
                        let rd = measure_transition_rdms(&ens.maps, a, a, RdmTag::Derivative(*j))?;
                        let c = sign * 0.5 * wx * w;
                        out[*j].gamma += &rd.gamma * c;
                        out[*j].big_gamma.add_scaled(&rd.big_gamma, c);
                    }
                }
                if let Some(cn) = counter {
                    cn.add_rdms(2 * factors.len());
                }
            }
        }
    }
    Ok(out.into_iter().map(|r| RdmSet { overlap: 0.0, ..r.symmetrized() }).collect())
}

/// `Σ_j v_j R_j`.
pub fn contract_rdms(rdms: &[RdmSet], v: &[f64], tag: RdmTag) -> RdmSet {
    let parts: Vec<(f64, &RdmSet)> = v.iter().copied().zip(rdms).collect();
    RdmSet::combine(&parts, tag)
}

/// `H^CC_jk = ∂²E_SA/∂θ_j∂θ_k`.
pub fn circuit_hessian(ens: &Ensemble, theta: &[f64], h: &SparseOperator, counter: Option<&EvalCounter>) -> Result<DMatrix<f64>> {
    let n = ens.n_params();
    let mut out = DMatrix::zeros(n, n);
    for (k, r) in ens.refs.iter().enumerate() {
        let w = ens.weights[k];
        match ens.engine {
            GradientEngine::Analytic => {
                let (psi, d) = ens.ansatz.derivatives(theta, r)?;
                let dd = ens.ansatz.second_derivatives(theta, r)?;
                let hpsi = h.apply(&psi);
                let hd: Vec<Vec<Complex64>> = d.iter().map(|v| h.apply(v)).collect();
                for j in 0..n {
                    for l in j..n {
                        let v = 2.0 * (re_dot(&dd[j][l - j], &hpsi) + re_dot(&d[j], &hd[l]));
                        out[(j, l)] += w * v;
                        if l != j {
                            out[(l, j)] += w * v;
                        }
                    }
                }
            }
            GradientEngine::ParameterShift => {
                out += shift_hessian(&ens.ansatz, theta, r, h, counter)? * w;
            }
        }
    }
    Ok(out)
}

/// `H^CO_{j,pq} = ∂G^O_pq/∂θ_j` from Fock matrices of the RDM derivatives.
pub fn circuit_orbital_hessian(rdm_derivs: &[RdmSet], mo: &MoIntegrals, partition: &Partition, mask: &PairMask) -> DMatrix<f64> {
    let mut out = DMatrix::zeros(rdm_derivs.len(), mask.len());
    for (j, r) in rdm_derivs.iter().enumerate() {
        let (g1, g2) = complete_rdms(r, partition);
        let f = generalized_fock(&g1, &g2, &mo.h, &mo.g);
        for (k, v) in orbital_gradient(&f, mask).into_iter().enumerate() {
            out[(j, k)] = v;
        }
    }
    out
}

/// Measurement tallies for the Hessian blocks.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct MeasurementCounts {
    pub n_params: usize,
    /// Independent `H^CC` entries, `n(n+1)/2`.
    pub hcc_entries: usize,
    /// `entries × 4 shifts × 8 × 8 strings`.
    pub hcc_nominal: usize,
    /// `n_params × 256`, the total quoted for `H^CO`.
    pub hco_nominal: usize,
    /// `n_params × 2 shifts × 8 strings`, one shifted Fock matrix per measurement.
    pub hco_per_element: usize,
    /// Evaluations actually performed while building the blocks.
    pub actual: EvalCounts,
}

impl MeasurementCounts {
    pub fn nominal(n_params: usize) -> Self {
        let entries = n_params * (n_params + 1) / 2;
        MeasurementCounts {
            n_params,
            hcc_entries: entries,
            hcc_nominal: entries * 4 * NOMINAL_STRINGS * NOMINAL_STRINGS,
            hco_nominal: n_params * 4 * NOMINAL_STRINGS * NOMINAL_STRINGS,
            hco_per_element: n_params * 2 * NOMINAL_STRINGS,
            actual: EvalCounts::default(),
        }
    }
}
