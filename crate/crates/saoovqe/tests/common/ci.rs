//! Determinant-basis CI written independently of the library's ladder code.
//! Spin orbitals are ordered in blocks here: all α (0..n) then all β (n..2n).

use nalgebra::{DMatrix, DVector};
use saoovqe::linalg::Tensor4;

/// Occupation list, index = block-ordered spin orbital.
pub type Det = Vec<bool>;

fn ladder(det: &mut Det, mode: usize, create: bool) -> Option<f64> {
    if det[mode] == create {
        return None;
    }
    let parity = det[..mode].iter().filter(|&&o| o).count();
    det[mode] = create;
    Some(if parity % 2 == 0 { 1.0 } else { -1.0 })
}

fn apply(ops: &[(usize, bool)], det: &Det) -> Option<(Det, f64)> {
    let mut d = det.clone();
    let mut sign = 1.0;
    for &(m, c) in ops.iter().rev() {
        sign *= ladder(&mut d, m, c)?;
    }
    Some((d, sign))
}

pub struct DetCi {
    pub n: usize,
    pub dets: Vec<Det>,
}

impl DetCi {
    pub fn new(n: usize, n_alpha: usize, n_beta: usize) -> Self {
        let strings = |k: usize| -> Vec<Vec<bool>> {
            (0..1usize << n)
                .filter(|m| m.count_ones() as usize == k)
                .map(|m| (0..n).map(|i| m >> i & 1 == 1).collect())
                .collect()
        };
        let mut dets = Vec::new();
        for a in strings(n_alpha) {
            for b in strings(n_beta) {
                let mut d = a.clone();
                d.extend(b);
                dets.push(d);
            }
        }
        DetCi { n, dets }
    }

    fn index(&self, d: &Det) -> Option<usize> {
        self.dets.iter().position(|x| x == d)
    }

    fn so(&self, p: usize, spin: usize) -> usize {
        p + spin * self.n
    }

    pub fn hamiltonian(&self, h: &DMatrix<f64>, g: &Tensor4, e0: f64) -> DMatrix<f64> {
        let n = self.n;
        let dim = self.dets.len();
        let mut m = DMatrix::identity(dim, dim) * e0;
        for (j, d) in self.dets.iter().enumerate() {
            for p in 0..n {
                for q in 0..n {
                    for s in 0..2 {
                        if let Some((d2, sg)) = apply(&[(self.so(p, s), true), (self.so(q, s), false)], d) {
                            if let Some(i) = self.index(&d2) {
                                m[(i, j)] += h[(p, q)] * sg;
                            }
                        }
                    }
                }
            }
            for p in 0..n {
                for q in 0..n {
                    for r in 0..n {
                        for s in 0..n {
                            let v = g[[p, q, r, s]];
                            if v == 0.0 {
                                continue;
                            }
                            for a in 0..2 {
                                for b in 0..2 {
                                    let ops = [
                                        (self.so(p, a), true),
                                        (self.so(r, b), true),
                                        (self.so(s, b), false),
                                        (self.so(q, a), false),
                                    ];
                                    if let Some((d2, sg)) = apply(&ops, d) {
                                        if let Some(i) = self.index(&d2) {
                                            m[(i, j)] += 0.5 * v * sg;
                                        }
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
        m
    }

    pub fn one_rdm(&self, bra: &DVector<f64>, ket: &DVector<f64>) -> DMatrix<f64> {
        let n = self.n;
        DMatrix::from_fn(n, n, |p, q| {
            let mut acc = 0.0;
            for (j, d) in self.dets.iter().enumerate() {
                for s in 0..2 {
                    if let Some((d2, sg)) = apply(&[(self.so(p, s), true), (self.so(q, s), false)], d) {
                        if let Some(i) = self.index(&d2) {
                            acc += bra[i] * sg * ket[j];
                        }
                    }
                }
            }
            acc
        })
    }

    pub fn two_rdm(&self, bra: &DVector<f64>, ket: &DVector<f64>) -> Tensor4 {
        Tensor4::from_fn(self.n, |p, q, r, s| {
            let mut acc = 0.0;
            for (j, d) in self.dets.iter().enumerate() {
                for a in 0..2 {
                    for b in 0..2 {
                        let ops = [
                            (self.so(p, a), true),
                            (self.so(r, b), true),
                            (self.so(s, b), false),
                            (self.so(q, a), false),
                        ];
                        if let Some((d2, sg)) = apply(&ops, d) {
                            if let Some(i) = self.index(&d2) {
                                acc += bra[i] * sg * ket[j];
                            }
                        }
                    }
                }
            }
            acc
        })
    }

    /// S² on the determinant list (S_z = 0 lists only): S_−S_+.
    pub fn s_squared(&self) -> DMatrix<f64> {
        let n = self.n;
        let dim = self.dets.len();
        let mut m = DMatrix::zeros(dim, dim);
        for (j, d) in self.dets.iter().enumerate() {
            for p in 0..n {
                for q in 0..n {
                    let ops = [(self.so(p, 1), true), (self.so(p, 0), false), (self.so(q, 0), true), (self.so(q, 1), false)];
                    if let Some((d2, sg)) = apply(&ops, d) {
                        if let Some(i) = self.index(&d2) {
                            m[(i, j)] += sg;
                        }
                    }
                }
            }
        }
        m
    }

    /// Lowest `k` singlet eigenpairs of the full determinant Hamiltonian.
    pub fn singlets(&self, h: &DMatrix<f64>, g: &Tensor4, e0: f64, k: usize) -> Vec<(f64, DVector<f64>)> {
        let s2 = self.s_squared();
        let se = s2.clone().symmetric_eigen();
        let cols: Vec<usize> = (0..se.eigenvalues.len()).filter(|&i| se.eigenvalues[i].abs() < 1e-8).collect();
        let p = DMatrix::from_fn(self.dets.len(), cols.len(), |i, c| se.eigenvectors[(i, cols[c])]);
        let hp = p.transpose() * self.hamiltonian(h, g, e0) * &p;
        let he = hp.symmetric_eigen();
        let mut idx: Vec<usize> = (0..he.eigenvalues.len()).collect();
        idx.sort_by(|&a, &b| he.eigenvalues[a].total_cmp(&he.eigenvalues[b]));
        idx.into_iter()
            .take(k)
            .map(|c| (he.eigenvalues[c], &p * he.eigenvectors.column(c)))
            .collect()
    }

    /// Map an interleaved-qubit basis amplitude vector onto this determinant
    /// list, including the reordering sign.
    pub fn from_qubit_amplitudes(&self, amps: &[f64]) -> DVector<f64> {
        let n = self.n;
        let nq = 2 * n;
        let mut v = DVector::zeros(self.dets.len());
        for (b, &a) in amps.iter().enumerate() {
            if a == 0.0 {
                continue;
            }
            let occ = |q: usize| b >> (nq - 1 - q) & 1 == 1;
            let mut d = vec![false; nq];
            for p in 0..n {
                d[p] = occ(2 * p);
                d[n + p] = occ(2 * p + 1);
            }
            // interleaved → blocked: count (p↓, q↑) with p < q
            let mut inv = 0;
            for p in 0..n {
                for q in p + 1..n {
                    if occ(2 * p + 1) && occ(2 * q) {
                        inv += 1;
                    }
                }
            }
            let sign = if inv % 2 == 0 { 1.0 } else { -1.0 };
            if let Some(i) = self.index(&d) {
                v[i] += sign * a;
            }
        }
        v
    }
}
