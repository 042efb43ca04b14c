use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fermion::ExcitationMaps;
use crate::integrals::Partition;
use crate::linalg::Tensor4;

/// Where an RDM came from.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RdmTag {
    State(usize),
    Transition(usize, usize),
    StateAveraged,
    Derivative(usize),
    Effective,
}

/// Active-space spin-free RDMs, `γ_pq = ⟨I|Ê_pq|J⟩` and
/// `Γ_pqrs = ⟨I|ê_pqrs|J⟩` with `ê_pqrs = Σ_στ a†_pσ a†_rτ a_sτ a_qσ`.
#[derive(Clone, Debug)]
pub struct RdmSet {
    pub gamma: DMatrix<f64>,
    pub big_gamma: Tensor4,
    /// `⟨I|J⟩`; scales the frozen-core part on completion.
    pub overlap: f64,
    pub tag: RdmTag,
}

impl RdmSet {
    pub fn zeros(n: usize, tag: RdmTag) -> Self {
        RdmSet { gamma: DMatrix::zeros(n, n), big_gamma: Tensor4::zeros(n), overlap: 0.0, tag }
    }

    pub fn n_active(&self) -> usize {
        self.gamma.nrows()
    }

    /// Average over the index symmetries of real states:
    /// `γ_pq = γ_qp`, `Γ_pqrs = Γ_rspq = Γ_qpsr = Γ_srqp`.
    pub fn symmetrized(&self) -> RdmSet {
        let n = self.n_active();
        let g = &self.big_gamma;
        RdmSet {
            gamma: (&self.gamma + self.gamma.transpose()) * 0.5,
            big_gamma: Tensor4::from_fn(n, |p, q, r, s| {
                0.25 * (g[[p, q, r, s]] + g[[r, s, p, q]] + g[[q, p, s, r]] + g[[s, r, q, p]])
            }),
            overlap: self.overlap,
            tag: self.tag.clone(),
        }
    }

    /// `Σ_k w_k·R_k` (overlaps combined the same way).
    pub fn combine(parts: &[(f64, &RdmSet)], tag: RdmTag) -> RdmSet {
        let n = parts.first().map(|(_, r)| r.n_active()).unwrap_or(0);
        let mut out = RdmSet::zeros(n, tag);
        for (w, r) in parts {
            out.gamma += &r.gamma * *w;
            out.big_gamma.add_scaled(&r.big_gamma, *w);
            out.overlap += w * r.overlap;
        }
        out
    }

    /// `Σ_pq h_pq γ_pq + ½ Σ_pqrs g_pqrs Γ_pqrs` plus `overlap·e_core`.
    pub fn energy(&self, h: &DMatrix<f64>, g: &Tensor4, e_core: f64) -> f64 {
        self.gamma.dot(h) + 0.5 * self.big_gamma.dot(g) + self.overlap * e_core
    }

    /// Largest violation of the state-RDM invariants: trace, symmetry and
    /// the partial trace `Σ_r Γ_pqrr = (N−1)γ_pq`.
    pub fn invariant_error(&self, n_elec: usize) -> f64 {
        let n = self.n_active();
        let ne = n_elec as f64;
        let mut err = (self.gamma.trace() - ne * self.overlap).abs();
        err = err.max((&self.gamma - self.gamma.transpose()).amax());
        let g = &self.big_gamma;
        for p in 0..n {
            for q in 0..n {
                let pt: f64 = (0..n).map(|r| g[[p, q, r, r]]).sum();
                err = err.max((pt - (ne - 1.0) * self.gamma[(p, q)]).abs());
                for r in 0..n {
                    for s in 0..n {
                        err = err.max((g[[p, q, r, s]] - g[[r, s, p, q]]).abs());
                    }
                }
            }
        }
        err
    }
}

fn check_len(maps: &ExcitationMaps, v: &[Complex64]) -> Result<()> {
    let dim = 1usize << (2 * maps.n_active());
    if v.len() != dim {
        return Err(Error::QubitCountMismatch { expected: 2 * maps.n_active(), found: v.len().trailing_zeros() as usize });
    }
    Ok(())
}

/// State RDMs, symmetrized.
pub fn measure_rdms(maps: &ExcitationMaps, state: &[Complex64], tag: RdmTag) -> Result<RdmSet> {
    check_len(maps, state)?;
    let norm: f64 = state.iter().map(|a| a.norm_sqr()).sum();
    Ok(RdmSet { gamma: maps.one_rdm(state, state), big_gamma: maps.two_rdm(state, state), overlap: norm, tag }.symmetrized())
}

/// Raw transition RDMs `⟨bra|…|ket⟩`; call [`RdmSet::symmetrized`] where
/// only the symmetric part matters.
pub fn measure_transition_rdms(maps: &ExcitationMaps, bra: &[Complex64], ket: &[Complex64], tag: RdmTag) -> Result<RdmSet> {
    check_len(maps, bra)?;
    check_len(maps, ket)?;
    let ovl: Complex64 = bra.iter().zip(ket).map(|(a, b)| a.conj() * b).sum();
    Ok(RdmSet { gamma: maps.one_rdm(bra, ket), big_gamma: maps.two_rdm(bra, ket), overlap: ovl.re, tag })
}

/// Full MO-space RDMs with the doubly occupied frozen block filled in:
/// `γ_ij = 2δ_ij·S`, `Γ_ijkl = (4δ_ijδ_kl − 2δ_ilδ_jk)·S`,
/// `Γ_iitu = Γ_tuii = 2γ_tu`, `Γ_ituі = −γ_ut`, `Γ_tiiu = −γ_tu`
/// where `S` is the overlap.
pub fn complete_rdms(rdm: &RdmSet, partition: &Partition) -> (DMatrix<f64>, Tensor4) {
    let n = partition.n_mo();
    let act = &partition.active;
    let fr = &partition.frozen;
    let s = rdm.overlap;
    let mut gamma = DMatrix::zeros(n, n);
    let mut big = Tensor4::zeros(n);
    for &i in fr {
        gamma[(i, i)] = 2.0 * s;
    }
    for (a, &t) in act.iter().enumerate() {
        for (b, &u) in act.iter().enumerate() {
            gamma[(t, u)] = rdm.gamma[(a, b)];
        }
    }
    for &i in fr {
        for &j in fr {
            big[[i, i, j, j]] += 4.0 * s;
            big[[i, j, j, i]] -= 2.0 * s;
        }
    }
    for &i in fr {
        for (a, &t) in act.iter().enumerate() {
            for (b, &u) in act.iter().enumerate() {
                let g = rdm.gamma[(a, b)];
                big[[i, i, t, u]] += 2.0 * g;
                big[[t, u, i, i]] += 2.0 * g;
                big[[i, u, t, i]] -= g;
                big[[t, i, i, u]] -= g;
            }
        }
    }
    for (a, &p) in act.iter().enumerate() {
        for (b, &q) in act.iter().enumerate() {
            for (c, &r) in act.iter().enumerate() {
                for (d, &t) in act.iter().enumerate() {
                    big[[p, q, r, t]] = rdm.big_gamma[[a, b, c, d]];
                }
            }
        }
    }
    (gamma, big)
}
