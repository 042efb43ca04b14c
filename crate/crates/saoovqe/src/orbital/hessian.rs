use nalgebra::DMatrix;
use rayon::prelude::*;

use super::{generalized_fock, PairMask};
use crate::linalg::Tensor4;

/// Second derivative of `E(C·exp(−K))` at `K = 0` over the mask pairs.
///
/// Resolved index form, checked against finite differences:
///
/// `E2_pq,rs = (1−P_pq)(1−P_rs)[2γ_pr h_qs − (F_pr + F_rp)δ_qs + 2Y_pqrs]`
///
/// `Y_pqrs = Σ_mn (Γ_pmrn + Γ_pmnr) g_qmsn + Γ_prmn g_qsmn`
///
/// with full-space RDMs and `F` the generalized Fock matrix.
pub fn orbital_hessian(gamma: &DMatrix<f64>, big: &Tensor4, h: &DMatrix<f64>, g: &Tensor4, mask: &PairMask) -> DMatrix<f64> {
    let n = h.nrows();
    let f = generalized_fock(gamma, big, h, g);
    let occ: Vec<usize> = (0..n).filter(|&p| (0..n).any(|t| gamma[(p, t)] != 0.0 || big[[p, t, t, p]] != 0.0 || big[[p, p, t, t]] != 0.0)).collect();
    let is_occ: Vec<bool> = (0..n).map(|p| occ.contains(&p)).collect();
    let y = |p: usize, q: usize, r: usize, s: usize| -> f64 {
        if !is_occ[p] || !is_occ[r] {
            return 0.0;
        }
        let mut v = 0.0;
        for &m in &occ {
            for &k in &occ {
                v += (big[[p, m, r, k]] + big[[p, m, k, r]]) * g[[q, m, s, k]] + big[[p, r, m, k]] * g[[q, s, m, k]];
            }
        }
        v
    };
    let x = |p: usize, q: usize, r: usize, s: usize| -> f64 {
        let mut v = 2.0 * gamma[(p, r)] * h[(q, s)] + 2.0 * y(p, q, r, s);
        if q == s {
            v -= f[(p, r)] + f[(r, p)];
        }
        v
    };
    let np = mask.len();
    let rows: Vec<Vec<f64>> = (0..np)
        .into_par_iter()
        .map(|a| {
            let (p, q) = mask.pairs[a];
            (0..np)
                .map(|b| {
                    let (r, s) = mask.pairs[b];
                    x(p, q, r, s) - x(q, p, r, s) - x(p, q, s, r) + x(q, p, s, r)
                })
                .collect()
        })
        .collect();
    DMatrix::from_fn(np, np, |a, b| rows[a][b])
}
