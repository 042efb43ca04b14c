use nalgebra::DMatrix;

use super::PairMask;
use crate::error::{Error, Result};
use crate::integrals::{frozen_fock, Partition};
use crate::linalg::Tensor4;

/// `F_pq = Σ_t γ_pt h_qt + Σ_tuv Γ_ptuv g_qtuv` over the full MO space.
pub fn generalized_fock(gamma: &DMatrix<f64>, big: &Tensor4, h: &DMatrix<f64>, g: &Tensor4) -> DMatrix<f64> {
    let n = h.nrows();
    let mut f = DMatrix::zeros(n, n);
    // rows of a completed RDM vanish for virtual orbitals
    let rows: Vec<usize> = (0..n)
        .filter(|&p| (0..n).any(|t| gamma[(p, t)] != 0.0) || (0..n * n * n).any(|k| big.data()[p * n * n * n + k] != 0.0))
        .collect();
    let occ = rows.clone();
    for &p in &rows {
        for q in 0..n {
            let mut v = 0.0;
            for t in 0..n {
                v += gamma[(p, t)] * h[(q, t)];
            }
            for &t in &occ {
                for &u in &occ {
                    for &w in &occ {
                        let x = big[[p, t, u, w]];
                        if x != 0.0 {
                            v += x * g[[q, t, u, w]];
                        }
                    }
                }
            }
            f[(p, q)] = v;
        }
    }
    f
}

#[derive(Clone, Debug)]
pub struct FockMatrices {
    /// Generalized Fock matrix; virtual rows are zero.
    pub general: DMatrix<f64>,
    /// `F^I_pq = h_pq + Σ_i 2(pq|ii) − (pi|iq)` over frozen `i`.
    pub frozen: DMatrix<f64>,
    /// `F^A_pq = Σ_tu γ_tu [(pq|tu) − ½(pt|uq)]`.
    pub active: DMatrix<f64>,
}

/// Partitioned build from active-space RDMs. `overlap` scales the frozen
/// contributions (1 for a state, `⟨I|J⟩` for a transition pair); the RDMs
/// must be symmetrized.
pub fn fock_matrices(
    gamma: &DMatrix<f64>,
    big: &Tensor4,
    overlap: f64,
    h: &DMatrix<f64>,
    g: &Tensor4,
    partition: &Partition,
) -> Result<FockMatrices> {
    let n = h.nrows();
    let act = &partition.active;
    let m = act.len();
    if gamma.shape() != (m, m) || big.dim() != m {
        return Err(Error::DimensionMismatch(format!(
            "RDMs of extent {} for {m} active orbitals",
            gamma.nrows()
        )));
    }
    partition.validate(n)?;
    let fi = frozen_fock(h, g, &partition.frozen);
    let fa = DMatrix::from_fn(n, n, |p, q| {
        let mut v = 0.0;
        for (a, &t) in act.iter().enumerate() {
            for (b, &u) in act.iter().enumerate() {
                v += gamma[(a, b)] * (g[[p, q, t, u]] - 0.5 * g[[p, t, u, q]]);
            }
        }
        v
    });
    let mut f = DMatrix::zeros(n, n);
    for &i in &partition.frozen {
        for q in 0..n {
            f[(i, q)] = 2.0 * (overlap * fi[(q, i)] + fa[(q, i)]);
        }
    }
    for (a, &v) in act.iter().enumerate() {
        for q in 0..n {
            let mut x = 0.0;
            for (b, &w) in act.iter().enumerate() {
                x += gamma[(a, b)] * fi[(q, w)];
            }
            for (b, &w) in act.iter().enumerate() {
                for (c, &xx) in act.iter().enumerate() {
                    for (d, &y) in act.iter().enumerate() {
                        x += big[[a, b, c, d]] * g[[q, w, xx, y]];
                    }
                }
            }
            f[(v, q)] = x;
        }
    }
    Ok(FockMatrices { general: f, frozen: fi, active: fa })
}

/// `G_pq = 2(F_pq − F_qp)` over the non-redundant pairs.
pub fn orbital_gradient(f: &DMatrix<f64>, mask: &PairMask) -> Vec<f64> {
    mask.pairs.iter().map(|&(p, q)| 2.0 * (f[(p, q)] - f[(q, p)])).collect()
}
