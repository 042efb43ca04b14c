use num_complex::Complex64;

use super::operator::apply_ladders;
use crate::linalg::Tensor4;
use nalgebra::DMatrix;

/// Precomputed action of Ê_pq and ê_pqrs on every basis state of a
/// `2·n_active`-qubit register, as `(from, to, sign)` triples.
#[derive(Clone, Debug)]
pub struct ExcitationMaps {
    n_active: usize,
    one: Vec<Vec<(usize, usize, f64)>>,
    two: Vec<Vec<(usize, usize, f64)>>,
}

impl ExcitationMaps {
    pub fn new(n_active: usize) -> Self {
        let nq = 2 * n_active;
        let dim = 1usize << nq;
        let n = n_active;
        let mut one = Vec::with_capacity(n * n);
        for p in 0..n {
            for q in 0..n {
                let mut v = Vec::new();
                for a in 0..2 {
                    let ops = [(2 * p + a, true), (2 * q + a, false)];
                    for b in 0..dim {
                        if let Some((t, s)) = apply_ladders(&ops, nq, b) {
                            v.push((b, t, s));
                        }
                    }
                }
                one.push(v);
            }
        }
        let mut two = Vec::with_capacity(n * n * n * n);
        for p in 0..n {
            for q in 0..n {
                for r in 0..n {
                    for s in 0..n {
                        let mut v = Vec::new();
                        for a in 0..2 {
                            for c in 0..2 {
                                let ops = [(2 * p + a, true), (2 * r + c, true), (2 * s + c, false), (2 * q + a, false)];
                                for b in 0..dim {
                                    if let Some((t, sg)) = apply_ladders(&ops, nq, b) {
                                        v.push((b, t, sg));
                                    }
                                }
                            }
                        }
                        two.push(v);
                    }
                }
            }
        }
        ExcitationMaps { n_active, one, two }
    }

    pub fn n_active(&self) -> usize {
        self.n_active
    }

    fn contract(map: &[(usize, usize, f64)], bra: &[Complex64], ket: &[Complex64]) -> f64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for &(b, t, s) in map {
            acc += bra[t].conj() * ket[b] * s;
        }
        acc.re
    }

    /// Raw `⟨bra|Ê_pq|ket⟩` (real part), no symmetrization.
    pub fn one_rdm(&self, bra: &[Complex64], ket: &[Complex64]) -> DMatrix<f64> {
        let n = self.n_active;
        DMatrix::from_fn(n, n, |p, q| Self::contract(&self.one[p * n + q], bra, ket))
    }

    /// Raw `⟨bra|ê_pqrs|ket⟩` (real part), no symmetrization.
    pub fn two_rdm(&self, bra: &[Complex64], ket: &[Complex64]) -> Tensor4 {
        let n = self.n_active;
        Tensor4::from_fn(n, |p, q, r, s| {
            Self::contract(&self.two[((p * n + q) * n + r) * n + s], bra, ket)
        })
    }
}
