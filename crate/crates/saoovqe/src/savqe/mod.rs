//! State-averaged energy, RDMs, circuit optimization, the SA-OO-VQE driver
//! and the final state resolution.

mod bfgs;
mod checkpoint;
mod driver;
mod ensemble;
mod rdm;
mod resolve;

pub use bfgs::{minimize, BfgsOptions, BfgsResult};
pub use checkpoint::Checkpoint;
pub use driver::{
    lowdin_orthonormalize, optimize_circuit, run_sa_oo_vqe, sa_full_rdms, ActiveProblem, Phase, SaOoVqeOptions,
    SaOoVqeResult, ThetaInit, TraceEntry, WarmStart,
};
pub use ensemble::{AnsatzConfig, Ensemble, EnsembleConfig, GradientEngine, SaEnergy};
pub use rdm::{complete_rdms, measure_rdms, measure_transition_rdms, RdmSet, RdmTag};
pub use resolve::{resolve_states, resolved_states, rotate_pair, Resolution};

impl SaOoVqeResult {
    pub fn checkpoint(&self) -> Checkpoint {
        Checkpoint { theta: self.theta.clone(), c: self.c.clone(), phi: self.phi, trace: self.trace.clone() }
    }
}
