use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use super::blocks::{circuit_hessian, circuit_orbital_hessian, contract_rdms, rdm_derivatives, MeasurementCounts};
use super::cp::{solve_coupled_perturbed, Multipliers, ResponseSystem, RhsKind};
use super::hamiltonian::DerivativeHamiltonian;
use super::EvalCounter;
use crate::error::{Error, Result};
use crate::integrals::{symmetrize, symmetrize8, IntegralSet};
use crate::linalg::Tensor4;
use crate::orbital::{generalized_fock, orbital_gradient, orbital_hessian, rotate_orbitals, PairMask};
use crate::savqe::{
    complete_rdms, measure_rdms, measure_transition_rdms, resolved_states, rotate_pair, ActiveProblem, Ensemble, RdmSet,
    RdmTag, SaOoVqeOptions, SaOoVqeResult,
};
use crate::sim::StateVector;

/// NAC division is refused below this gap (Ha).
pub const DEGENERATE_GAP: f64 = 1e-8;

type FullRdms = (DMatrix<f64>, Tensor4);

/// Everything at a converged, resolved point that the gradient and coupling
/// formulas share: resolved states, their RDMs and the Hessian blocks.
#[derive(Clone, Debug)]
pub struct ResponseContext {
    pub ints: IntegralSet,
    pub c: DMatrix<f64>,
    pub theta: Vec<f64>,
    pub phi: f64,
    pub energies: [f64; 2],
    pub ens: Ensemble,
    pub problem: ActiveProblem,
    pub mask: PairMask,
    /// `Ψ_0`, `Ψ_1`.
    pub states: [Vec<Complex64>; 2],
    /// Rotated references with `U|Φ_I⟩ = Ψ_I`.
    pub references: [StateVector; 2],
    /// Full-space state RDMs of `Ψ_0`, `Ψ_1`.
    pub state_rdms: [FullRdms; 2],
    pub sa_rdms: FullRdms,
    /// Active-space `∂R^SA/∂θ_j`.
    pub rdm_derivs: Vec<RdmSet>,
    pub system: ResponseSystem,
    pub counts: MeasurementCounts,
}

/// `dE_I/dx` with its multipliers.
#[derive(Clone, Debug, Serialize)]
pub struct StateGradient {
    pub state: usize,
    pub labels: Vec<String>,
    pub values: Vec<f64>,
    pub multipliers: Multipliers,
}

/// Branching-space quantities for one state pair.
#[derive(Clone, Debug, Serialize)]
pub struct BranchingVectors {
    pub i: usize,
    pub j: usize,
    pub labels: Vec<String>,
    /// `⟨Ψ_I|∂_x Ψ_J⟩ = ci_term + csf_term`.
    pub nac: Vec<f64>,
    pub ci_term: Vec<f64>,
    pub csf_term: Vec<f64>,
    /// `(E_J − E_I)·ci_term`, the derivative-coupling vector.
    pub h: Vec<f64>,
    pub grad_i: Vec<f64>,
    pub grad_j: Vec<f64>,
    /// `½(dE_J/dx − dE_I/dx)`.
    pub g_diff: Vec<f64>,
    pub gap: f64,
    pub multipliers: Multipliers,
}

/// `Σ dh·γ + ½ Σ dg·Γ`.
fn contract(dh: &DerivativeHamiltonian, r: &FullRdms) -> f64 {
    dh.dh.dot(&r.0) + 0.5 * dh.dg.dot(&r.1)
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |m, x| m.max(x.abs()))
}

/// RDMs whose contraction with `(dh, dg)` equals `Σ κ̄_pq·G_pq[dh, dg]`
/// for the orbital gradient built from `(γ, Γ)`.
pub fn orbital_effective_rdms(k_bar: &DMatrix<f64>, gamma: &DMatrix<f64>, big: &Tensor4) -> FullRdms {
    let n = gamma.nrows();
    let g1 = symmetrize(&(k_bar.transpose() * gamma * 2.0));
    let mut g2 = Tensor4::zeros(n);
    for q in 0..n {
        for p in 0..n {
            let k = k_bar[(p, q)];
            if k == 0.0 {
                continue;
            }
            for t in 0..n {
                for u in 0..n {
                    for v in 0..n {
                        g2[[q, t, u, v]] += 4.0 * k * big[[p, t, u, v]];
                    }
                }
            }
        }
    }
    (g1, symmetrize8(&g2))
}

impl ResponseContext {
    /// Build the context from a converged, resolved result. The ensemble and
    /// engine come from `opts`, which must be the options of the run.
    pub fn new(ints: &IntegralSet, result: &SaOoVqeResult, opts: &SaOoVqeOptions) -> Result<Self> {
        Self::with_counter(ints, result, opts, None)
    }

    pub fn with_counter(ints: &IntegralSet, result: &SaOoVqeResult, opts: &SaOoVqeOptions, counter: Option<&EvalCounter>) -> Result<Self> {
        if result.resolution.degenerate || !result.phi.is_finite() {
            return Err(Error::Unresolved);
        }
        let n_act = ints.partition.active.len();
        let ens = Ensemble::new(n_act, ints.n_elec_active(), &opts.ensemble, &opts.ansatz, opts.engine)?;
        if !opts.ensemble.equal_weights() {
            return Err(Error::UnequalWeights);
        }
        if result.theta.len() != ens.n_params() {
            return Err(Error::DimensionMismatch(format!("{} angles for {} parameters", result.theta.len(), ens.n_params())));
        }
        let theta = result.theta.clone();
        let c = result.c.clone();
        let problem = ActiveProblem::new(ints, &c)?;
        let mask = PairMask::new(&ints.partition, opts.unmask_active);
        let [a, b] = ens.states(&theta)?;
        let states = resolved_states(&a, &b, result.phi);
        let nq = 2 * n_act;
        let r0 = ens.refs[0].amplitudes();
        let r1 = ens.refs[1].amplitudes();
        let references = [
            StateVector::from_amplitudes(nq, rotate_pair(r0, r1, result.phi))?,
            StateVector::from_amplitudes(nq, rotate_pair(r0, r1, result.phi + std::f64::consts::FRAC_PI_2))?,
        ];
        let energies = [problem.sparse.sandwich(&states[0], &states[0]).re, problem.sparse.sandwich(&states[1], &states[1]).re];
        let state_rdms = [
            complete_rdms(&measure_rdms(&ens.maps, &states[0], RdmTag::State(0))?, &ints.partition),
            complete_rdms(&measure_rdms(&ens.maps, &states[1], RdmTag::State(1))?, &ints.partition),
        ];
        let sa_rdms = complete_rdms(&ens.sa_rdms(&theta)?, &ints.partition);

        let before = counter.map(|c| c.snapshot()).unwrap_or_default();
        let h_cc = circuit_hessian(&ens, &theta, &problem.sparse, counter)?;
        let rdm_derivs = rdm_derivatives(&ens, &theta, counter)?;
        let h_co = circuit_orbital_hessian(&rdm_derivs, &problem.mo, &ints.partition, &mask);
        let h_oo = orbital_hessian(&sa_rdms.0, &sa_rdms.1, &problem.mo.h, &problem.mo.g, &mask);
        let mut counts = MeasurementCounts::nominal(ens.n_params());
        if let Some(cn) = counter {
            counts.actual = cn.snapshot() - before;
        }
        Ok(ResponseContext {
            ints: ints.clone(),
            c,
            theta,
            phi: result.phi,
            energies,
            ens,
            problem,
            mask,
            states,
            references,
            state_rdms,
            sa_rdms,
            rdm_derivs,
            system: ResponseSystem { h_oo, h_cc, h_co },
            counts,
        })
    }

    fn check_state(&self, i: usize) -> Result<()> {
        if i > 1 {
            return Err(Error::IndexOutOfRange { index: i, limit: 2 });
        }
        Ok(())
    }

    /// Symmetrized transition RDMs `⟨Ψ_I|…|Ψ_J⟩` (zero overlap) and the raw
    /// active one-body transition matrix.
    fn transition(&self, i: usize, j: usize) -> Result<(FullRdms, DMatrix<f64>)> {
        let raw = measure_transition_rdms(&self.ens.maps, &self.states[i], &self.states[j], RdmTag::Transition(i, j))?;
        let sym = RdmSet { overlap: 0.0, ..raw.symmetrized() };
        Ok((complete_rdms(&sym, &self.ints.partition), raw.gamma))
    }

    fn orbital_gradient_of(&self, r: &FullRdms) -> Vec<f64> {
        let f = generalized_fock(&r.0, &r.1, &self.problem.mo.h, &self.problem.mo.g);
        orbital_gradient(&f, &self.mask)
    }

    pub fn gradient_multipliers(&self, i: usize) -> Result<Multipliers> {
        self.check_state(i)?;
        let g_o = self.orbital_gradient_of(&self.state_rdms[i]);
        let g_c = self.ens.state_gradient(&self.theta, &self.references[i], &self.problem.sparse, None)?;
        solve_coupled_perturbed(&self.system, RhsKind::Gradient(i), &g_o, &g_c)
    }

    pub fn nac_multipliers(&self, i: usize, j: usize) -> Result<Multipliers> {
        self.check_state(i)?;
        self.check_state(j)?;
        let (t, _) = self.transition(i, j)?;
        let g_o = self.orbital_gradient_of(&t);
        solve_coupled_perturbed(&self.system, RhsKind::Nac(i, j), &g_o, &vec![0.0; self.ens.n_params()])
    }

    /// Full-space RDMs carrying the multiplier terms: the orbital part
    /// contracted with the SA RDMs and the circuit part from `Σ θ̄_j ∂R^SA/∂θ_j`.
    pub fn multiplier_rdms(&self, m: &Multipliers) -> FullRdms {
        let k = self.mask.to_matrix(&m.kappa_bar);
        let (mut g1, mut g2) = orbital_effective_rdms(&k, &self.sa_rdms.0, &self.sa_rdms.1);
        let dr = contract_rdms(&self.rdm_derivs, &m.theta_bar, RdmTag::Effective);
        if dr.n_active() > 0 {
            let (c1, c2) = complete_rdms(&RdmSet { overlap: 0.0, ..dr }, &self.ints.partition);
            g1 += c1;
            g2.add_scaled(&c2, 1.0);
        }
        (g1, g2)
    }

    /// Effective RDMs of state `I`: its own plus the multiplier terms.
    pub fn effective_rdms(&self, i: usize, m: &Multipliers) -> Result<FullRdms> {
        self.check_state(i)?;
        let (m1, m2) = self.multiplier_rdms(m);
        let mut g2 = self.state_rdms[i].1.clone();
        g2.add_scaled(&m2, 1.0);
        Ok((&self.state_rdms[i].0 + m1, g2))
    }

    /// `dE_I/dx` for every coordinate.
    pub fn gradient(&self, i: usize, dhs: &[DerivativeHamiltonian]) -> Result<StateGradient> {
        let m = self.gradient_multipliers(i)?;
        let eff = self.effective_rdms(i, &m)?;
        let values = dhs.iter().map(|d| contract(d, &eff) + d.de_nuc).collect();
        Ok(StateGradient { state: i, labels: dhs.iter().map(|d| d.label.clone()).collect(), values, multipliers: m })
    }

    /// `(E_J − E_I)·D^CI_IJ` per coordinate, the multipliers and the gap.
    pub fn nac_numerator(&self, i: usize, j: usize, dhs: &[DerivativeHamiltonian]) -> Result<(Vec<f64>, Multipliers, f64)> {
        let m = self.nac_multipliers(i, j)?;
        let (t, _) = self.transition(i, j)?;
        let (m1, m2) = self.multiplier_rdms(&m);
        let mut g2 = t.1;
        g2.add_scaled(&m2, 1.0);
        let eff = (t.0 + m1, g2);
        let num = dhs.iter().map(|d| contract(d, &eff)).collect();
        Ok((num, m, self.energies[j] - self.energies[i]))
    }

    /// `−½ Σ_pq γ^IJ_pq (T_pq − T_qp)` over the active block.
    pub fn csf_term(&self, i: usize, j: usize, dhs: &[DerivativeHamiltonian]) -> Result<Vec<f64>> {
        let (_, raw) = self.transition(i, j)?;
        let act = &self.ints.partition.active;
        Ok(dhs
            .iter()
            .map(|d| {
                let mut v = 0.0;
                for (a, &p) in act.iter().enumerate() {
                    for (b, &q) in act.iter().enumerate() {
                        v += raw[(a, b)] * (d.t_half[(p, q)] - d.t_half[(q, p)]);
                    }
                }
                -0.5 * v
            })
            .collect())
    }

    /// NAC with gradients of both states. A gap below [`DEGENERATE_GAP`]
    /// gives [`Error::DegenerateGap`] carrying the numerator.
    pub fn nac(&self, i: usize, j: usize, dhs: &[DerivativeHamiltonian]) -> Result<BranchingVectors> {
        if i == j {
            return Err(Error::InvalidParameter("coupling needs two different states".into()));
        }
        let (h, m, gap) = self.nac_numerator(i, j, dhs)?;
        if gap.abs() < DEGENERATE_GAP {
            return Err(Error::DegenerateGap { gap: gap.abs(), numerator: h });
        }
        let ci_term: Vec<f64> = h.iter().map(|x| x / gap).collect();
        let csf_term = self.csf_term(i, j, dhs)?;
        let nac = ci_term.iter().zip(&csf_term).map(|(a, b)| a + b).collect();
        let grad_i = self.gradient(i, dhs)?.values;
        let grad_j = self.gradient(j, dhs)?.values;
        let g_diff = grad_i.iter().zip(&grad_j).map(|(a, b)| 0.5 * (b - a)).collect();
        Ok(BranchingVectors {
            i,
            j,
            labels: dhs.iter().map(|d| d.label.clone()).collect(),
            nac,
            ci_term,
            csf_term,
            h,
            grad_i,
            grad_j,
            g_diff,
            gap,
            multipliers: m,
        })
    }

    /// The Lagrangian the multipliers make stationary, evaluated at circuit
    /// angles `theta` and orbitals `C·exp(−K(kappa))` with the geometry fixed.
    /// Gradient case: `E_I` at fixed `φ*`. Coupling case: `⟨Ψ_I|H|Ψ_J⟩` with
    /// the converged state vectors held fixed.
    pub fn lagrangian(&self, m: &Multipliers, theta: &[f64], kappa: &[f64]) -> Result<f64> {
        let c = rotate_orbitals(&self.c, &self.mask.to_matrix(kappa))?;
        let p = ActiveProblem::new(&self.ints, &c)?;
        let base = match m.kind {
            RhsKind::Gradient(i) => {
                let v = self.ens.ansatz.apply(theta, &self.references[i])?;
                p.sparse.sandwich(v.amplitudes(), v.amplitudes()).re
            }
            RhsKind::Nac(i, j) => p.sparse.sandwich(&self.states[i], &self.states[j]).re,
        };
        let sa = self.ens.sa_rdms(theta)?;
        let (g1, g2) = complete_rdms(&sa, &self.ints.partition);
        let go = orbital_gradient(&generalized_fock(&g1, &g2, &p.mo.h, &p.mo.g), &self.mask);
        let (_, gc) = self.ens.sa_gradient(theta, &p.sparse, None)?;
        let ko: f64 = m.kappa_bar.iter().zip(&go).map(|(a, b)| a * b).sum();
        let tc: f64 = m.theta_bar.iter().zip(&gc).map(|(a, b)| a * b).sum();
        Ok(base + ko + tc)
    }

    /// Largest orbital and circuit SA-gradient components at the context point.
    pub fn sa_gradient_max(&self) -> Result<(f64, f64)> {
        let go = self.orbital_gradient_of(&self.sa_rdms);
        let (_, gc) = self.ens.sa_gradient(&self.theta, &self.problem.sparse, None)?;
        Ok((max_abs(&go), max_abs(&gc)))
    }
}

/// Convenience: context plus one state gradient.
pub fn analytic_gradient(
    ints: &IntegralSet,
    result: &SaOoVqeResult,
    opts: &SaOoVqeOptions,
    i: usize,
    dhs: &[DerivativeHamiltonian],
) -> Result<StateGradient> {
    ResponseContext::new(ints, result, opts)?.gradient(i, dhs)
}

/// Convenience: context plus one coupling.
pub fn analytic_nac(
    ints: &IntegralSet,
    result: &SaOoVqeResult,
    opts: &SaOoVqeOptions,
    i: usize,
    j: usize,
    dhs: &[DerivativeHamiltonian],
) -> Result<BranchingVectors> {
    ResponseContext::new(ints, result, opts)?.nac(i, j, dhs)
}
