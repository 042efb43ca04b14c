use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::bfgs::{minimize, BfgsOptions, BfgsResult};
use super::ensemble::{AnsatzConfig, Ensemble, EnsembleConfig, GradientEngine, SaEnergy};
use super::rdm::complete_rdms;
use super::resolve::{resolve_states, Resolution};
use crate::error::{Error, Result};
use crate::fermion::ActiveHamiltonian;
use crate::integrals::{ao_to_mo, fold_frozen_core, IntegralSet, MoIntegrals};
use crate::linalg::sym_eigen;
use crate::orbital::{generalized_fock, newton_step, orbital_gradient, orbital_hessian, rotate_orbitals, PairMask};
use crate::response::EvalCounter;
use crate::sim::SparseOperator;

/// Starting angles when no warm start is given.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ThetaInit {
    #[default]
    Zeros,
    /// Uniform in `[−scale, scale]`.
    Random { scale: f64, seed: u64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SaOoVqeOptions {
    pub ensemble: EnsembleConfig,
    pub ansatz: AnsatzConfig,
    pub engine: GradientEngine,
    pub theta_init: ThetaInit,
    /// Ha; accepted-step energy change for the circuit optimizer.
    pub energy_tol: f64,
    /// Ha/rad, max-norm.
    pub circuit_grad_tol: f64,
    /// Ha/rad, max-norm over non-redundant pairs.
    pub orbital_grad_tol: f64,
    pub max_inner: usize,
    pub max_outer: usize,
    pub unmask_active: bool,
    /// rad
    pub max_orbital_step: f64,
}

impl Default for SaOoVqeOptions {
    fn default() -> Self {
        SaOoVqeOptions {
            ensemble: EnsembleConfig::default(),
            ansatz: AnsatzConfig::default(),
            engine: GradientEngine::default(),
            theta_init: ThetaInit::default(),
            energy_tol: 1e-8,
            circuit_grad_tol: 1e-8,
            orbital_grad_tol: 1e-8,
            max_inner: 500,
            max_outer: 200,
            unmask_active: false,
            max_orbital_step: 0.5,
        }
    }
}

impl SaOoVqeOptions {
    pub fn bfgs(&self) -> BfgsOptions {
        BfgsOptions { f_tol: self.energy_tol, g_tol: self.circuit_grad_tol, max_iter: self.max_inner, max_step: 0.5 }
    }
}

/// Integrals in the current orbitals and the folded active-space operator.
#[derive(Clone, Debug)]
pub struct ActiveProblem {
    pub mo: MoIntegrals,
    pub hamiltonian: ActiveHamiltonian,
    pub sparse: SparseOperator,
}

impl ActiveProblem {
    pub fn new(ints: &IntegralSet, c: &DMatrix<f64>) -> Result<Self> {
        let mut at = ints.clone();
        at.c = c.clone();
        let mo = ao_to_mo(&at)?;
        let hamiltonian = fold_frozen_core(&mo.h, &mo.g, ints.e_nuc, &ints.partition, ints.n_elec_active())?;
        let sparse = hamiltonian.sparse();
        Ok(ActiveProblem { mo, hamiltonian, sparse })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Phase {
    Circuit,
    Orbital,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceEntry {
    pub outer: usize,
    pub phase: Phase,
    pub e_sa: f64,
    /// Max-norm of the gradient the phase acted on, at its start.
    pub grad: f64,
}

/// θ and C carried over from a nearby geometry.
#[derive(Clone, Debug)]
pub struct WarmStart {
    pub theta: Vec<f64>,
    pub c: DMatrix<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SaOoVqeResult {
    pub theta: Vec<f64>,
    #[serde(skip)]
    pub c: DMatrix<f64>,
    pub phi: f64,
    pub e0: f64,
    pub e1: f64,
    pub e_sa: f64,
    /// Energies of `U|Φ_A⟩`, `U|Φ_B⟩` before resolution.
    pub unresolved: SaEnergy,
    pub resolution: Resolution,
    pub trace: Vec<TraceEntry>,
    pub outer_iterations: usize,
    pub orbital_steps: usize,
    pub inner_iterations: usize,
    pub converged: bool,
    /// Some circuit optimization stopped at its iteration cap.
    pub inner_unconverged: bool,
    /// Newton steps solved by least squares.
    pub least_squares_steps: usize,
    pub circuit_grad_max: f64,
    pub orbital_grad_max: f64,
}

/// `C(CᵀSC)^{-1/2}`, the closest S-orthonormal set to `C`.
pub fn lowdin_orthonormalize(c: &DMatrix<f64>, s: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    if c.nrows() != s.nrows() {
        return Err(Error::DimensionMismatch(format!("C has {} rows, S is {}", c.nrows(), s.nrows())));
    }
    let m = c.transpose() * s * c;
    let (vals, vecs) = sym_eigen(&m);
    if vals.min() <= 1e-12 {
        return Err(Error::InvalidParameter("warm-start orbitals are linearly dependent".into()));
    }
    let d = DMatrix::from_diagonal(&vals.map(|v| 1.0 / v.sqrt()));
    Ok(c * (&vecs * d * vecs.transpose()))
}

/// Minimize `E_SA(θ)` at fixed orbitals.
pub fn optimize_circuit(
    ens: &Ensemble,
    theta0: &[f64],
    h: &SparseOperator,
    opts: &BfgsOptions,
    counter: Option<&EvalCounter>,
) -> Result<BfgsResult> {
    minimize(|t| ens.sa_gradient(t, h, counter).map(|(e, g)| (e.sa, g)), theta0, opts)
}

fn initial_theta(n: usize, init: ThetaInit) -> Vec<f64> {
    match init {
        ThetaInit::Zeros => vec![0.0; n],
        ThetaInit::Random { scale, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..n).map(|_| rng.gen_range(-scale..=scale)).collect()
        }
    }
}

/// Full-space SA RDMs at `θ`, completed over the frozen orbitals.
pub fn sa_full_rdms(ens: &Ensemble, theta: &[f64], ints: &IntegralSet) -> Result<(DMatrix<f64>, crate::linalg::Tensor4)> {
    let sa = ens.sa_rdms(theta)?;
    Ok(complete_rdms(&sa, &ints.partition))
}

/// Alternate circuit optimization and level-shifted Newton orbital steps
/// until both gradients are converged, then resolve the two states.
pub fn run_sa_oo_vqe(ints: &IntegralSet, opts: &SaOoVqeOptions, warm: Option<&WarmStart>) -> Result<SaOoVqeResult> {
    ints.validate()?;
    if !opts.ensemble.equal_weights() {
        opts.ensemble.validate()?;
        return Err(Error::UnequalWeights);
    }
    let n_act = ints.partition.active.len();
    let ens = Ensemble::new(n_act, ints.n_elec_active(), &opts.ensemble, &opts.ansatz, opts.engine)?;
    let (mut theta, mut c) = match warm {
        Some(w) => {
            if w.theta.len() != ens.n_params() {
                return Err(Error::DimensionMismatch(format!(
                    "warm start has {} angles, ansatz {}",
                    w.theta.len(),
                    ens.n_params()
                )));
            }
            (w.theta.clone(), lowdin_orthonormalize(&w.c, &ints.s_ao)?)
        }
        None => (initial_theta(ens.n_params(), opts.theta_init), ints.c.clone()),
    };
    let mask = PairMask::new(&ints.partition, opts.unmask_active);
    let bfgs = opts.bfgs();
    let mut trace = Vec::new();
    let mut problem = ActiveProblem::new(ints, &c)?;
    let mut converged = false;
    let mut inner_unconverged = false;
    let mut inner_iterations = 0;
    let mut orbital_steps = 0;
    let mut least_squares_steps = 0;
    let mut circuit_grad_max;
    let mut orbital_grad_max;
    let mut outer = 0;
    loop {
        let g0 = ens.sa_gradient(&theta, &problem.sparse, None)?.1;
        let inner = optimize_circuit(&ens, &theta, &problem.sparse, &bfgs, None)?;
        inner_iterations += inner.iterations;
        inner_unconverged |= !inner.converged;
        theta = inner.x;
        circuit_grad_max = inner.grad.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        let e_sa = inner.f;
        trace.push(TraceEntry { outer, phase: Phase::Circuit, e_sa, grad: g0.iter().fold(0.0f64, |m, x| m.max(x.abs())) });

        let (gamma, big) = sa_full_rdms(&ens, &theta, ints)?;
        let f = generalized_fock(&gamma, &big, &problem.mo.h, &problem.mo.g);
        let grad = orbital_gradient(&f, &mask);
        orbital_grad_max = grad.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        if orbital_grad_max < opts.orbital_grad_tol && inner.converged {
            converged = true;
            break;
        }
        if outer + 1 >= opts.max_outer {
            break;
        }
        let hess = orbital_hessian(&gamma, &big, &problem.mo.h, &problem.mo.g, &mask);
        let step = newton_step(&grad, &hess, opts.max_orbital_step)?;
        least_squares_steps += step.least_squares as usize;
        let k = mask.to_matrix(&step.kappa);
        let mut scale = 1.0;
        let mut accepted = None;
        for _ in 0..10 {
            let cn = rotate_orbitals(&c, &(&k * scale))?;
            let pn = ActiveProblem::new(ints, &cn)?;
            let en = ens.sa_energy(&theta, &pn.sparse)?.sa;
            if en <= e_sa + 1e-12 * e_sa.abs().max(1.0) {
                accepted = Some((cn, pn, en));
                break;
            }
            scale *= 0.5;
        }
        let Some((cn, pn, en)) = accepted else {
            // no orbital descent available at this θ; stop with what we have
            break;
        };
        c = cn;
        problem = pn;
        orbital_steps += 1;
        trace.push(TraceEntry { outer, phase: Phase::Orbital, e_sa: en, grad: orbital_grad_max });
        outer += 1;
    }
    let unresolved = ens.sa_energy(&theta, &problem.sparse)?;
    let resolution = resolve_states(&ens, &theta, &problem.sparse)?;
    Ok(SaOoVqeResult {
        theta,
        c,
        phi: resolution.phi,
        e0: resolution.e0,
        e1: resolution.e1,
        e_sa: unresolved.sa,
        unresolved,
        resolution,
        trace,
        outer_iterations: outer + 1,
        orbital_steps,
        inner_iterations,
        converged,
        inner_unconverged,
        least_squares_steps,
        circuit_grad_max,
        orbital_grad_max,
    })
}
