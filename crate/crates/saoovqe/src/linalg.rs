//! Dense helpers: a four-index tensor, symmetric eigen solves, matrix
//! exponential and a truncated-SVD solver.

use std::ops::{Index, IndexMut};

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Dense rank-4 tensor with equal extents, row-major `(p, q, r, s)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Tensor4 {
    n: usize,
    data: Vec<f64>,
}

impl Tensor4 {
    pub fn zeros(n: usize) -> Self {
        Tensor4 { n, data: vec![0.0; n * n * n * n] }
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize, usize, usize) -> f64) -> Self {
        let mut t = Tensor4::zeros(n);
        for p in 0..n {
            for q in 0..n {
                for r in 0..n {
                    for s in 0..n {
                        t[[p, q, r, s]] = f(p, q, r, s);
                    }
                }
            }
        }
        t
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    #[inline]
    fn offset(&self, p: usize, q: usize, r: usize, s: usize) -> usize {
        ((p * self.n + q) * self.n + r) * self.n + s
    }

    /// Set all eight chemists'-notation permutations of `(pq|rs)`.
    pub fn set_sym8(&mut self, p: usize, q: usize, r: usize, s: usize, v: f64) {
        for (a, b, c, d) in [
            (p, q, r, s),
            (q, p, r, s),
            (p, q, s, r),
            (q, p, s, r),
            (r, s, p, q),
            (s, r, p, q),
            (r, s, q, p),
            (s, r, q, p),
        ] {
            self[[a, b, c, d]] = v;
        }
    }

    pub fn scale(&self, a: f64) -> Tensor4 {
        Tensor4 { n: self.n, data: self.data.iter().map(|x| x * a).collect() }
    }

    pub fn add_scaled(&mut self, other: &Tensor4, a: f64) {
        assert_eq!(self.n, other.n);
        self.data.iter_mut().zip(&other.data).for_each(|(x, y)| *x += a * y);
    }

    /// `Σ self·other`.
    pub fn dot(&self, other: &Tensor4) -> f64 {
        assert_eq!(self.n, other.n);
        self.data.iter().zip(&other.data).map(|(x, y)| x * y).sum()
    }

    pub fn max_abs_diff(&self, other: &Tensor4) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    /// Largest violation of the 8-fold real symmetry.
    pub fn sym8_error(&self) -> f64 {
        let n = self.n;
        let mut err: f64 = 0.0;
        for p in 0..n {
            for q in 0..n {
                for r in 0..n {
                    for s in 0..n {
                        let v = self[[p, q, r, s]];
                        err = err
                            .max((v - self[[q, p, r, s]]).abs())
                            .max((v - self[[p, q, s, r]]).abs())
                            .max((v - self[[r, s, p, q]]).abs());
                    }
                }
            }
        }
        err
    }

    /// Sub-tensor on the index list `idx`.
    pub fn slice(&self, idx: &[usize]) -> Tensor4 {
        let m = idx.len();
        Tensor4::from_fn(m, |p, q, r, s| self[[idx[p], idx[q], idx[r], idx[s]]])
    }

    /// Embed `self` into a larger zero tensor at positions `idx`.
    pub fn embed(&self, n: usize, idx: &[usize]) -> Tensor4 {
        let mut out = Tensor4::zeros(n);
        let m = self.n;
        for p in 0..m {
            for q in 0..m {
                for r in 0..m {
                    for s in 0..m {
                        out[[idx[p], idx[q], idx[r], idx[s]]] = self[[p, q, r, s]];
                    }
                }
            }
        }
        out
    }

    /// `out_pqrs = Σ a_μp b_νq c_λr d_σs self_μνλσ` with square `n×n` factors.
    pub fn transform4(&self, a: &DMatrix<f64>, b: &DMatrix<f64>, c: &DMatrix<f64>, d: &DMatrix<f64>) -> Tensor4 {
        let n = self.n;
        for m in [a, b, c, d] {
            assert_eq!(m.nrows(), n);
            assert_eq!(m.ncols(), n);
        }
        // one index at a time, O(n^5)
        let mut cur = self.data.clone();
        let mut next = vec![0.0; cur.len()];
        let n2 = n * n;
        let n3 = n2 * n;
        // index 3
        for i in 0..n3 {
            for s in 0..n {
                let mut acc = 0.0;
                for k in 0..n {
                    acc += d[(k, s)] * cur[i * n + k];
                }
                next[i * n + s] = acc;
            }
        }
        std::mem::swap(&mut cur, &mut next);
        // index 2
        for i in 0..n2 {
            for r in 0..n {
                for s in 0..n {
                    let mut acc = 0.0;
                    for k in 0..n {
                        acc += c[(k, r)] * cur[(i * n + k) * n + s];
                    }
                    next[(i * n + r) * n + s] = acc;
                }
            }
        }
        std::mem::swap(&mut cur, &mut next);
        // index 1
        for p in 0..n {
            for q in 0..n {
                for j in 0..n2 {
                    let mut acc = 0.0;
                    for k in 0..n {
                        acc += b[(k, q)] * cur[(p * n + k) * n2 + j];
                    }
                    next[(p * n + q) * n2 + j] = acc;
                }
            }
        }
        std::mem::swap(&mut cur, &mut next);
        // index 0
        for p in 0..n {
            for j in 0..n3 {
                let mut acc = 0.0;
                for k in 0..n {
                    acc += a[(k, p)] * cur[k * n3 + j];
                }
                next[p * n3 + j] = acc;
            }
        }
        Tensor4 { n, data: next }
    }

    /// Full transform with one coefficient matrix on every index.
    pub fn transform(&self, c: &DMatrix<f64>) -> Tensor4 {
        self.transform4(c, c, c, c)
    }

    /// Rectangular transform `n_ao^4 → n_mo^4` with `c: n_ao × n_mo`.
    pub fn transform_rect(&self, c: &DMatrix<f64>) -> Tensor4 {
        assert_eq!(c.nrows(), self.n);
        if c.ncols() == self.n {
            return self.transform(c);
        }
        let m = c.ncols();
        let n = self.n;
        Tensor4::from_fn(m, |p, q, r, s| {
            let mut acc = 0.0;
            for a in 0..n {
                for b in 0..n {
                    let ab = c[(a, p)] * c[(b, q)];
                    if ab == 0.0 {
                        continue;
                    }
                    for k in 0..n {
                        for l in 0..n {
                            acc += ab * c[(k, r)] * c[(l, s)] * self[[a, b, k, l]];
                        }
                    }
                }
            }
            acc
        })
    }
}

impl Index<[usize; 4]> for Tensor4 {
    type Output = f64;
    #[inline]
    fn index(&self, i: [usize; 4]) -> &f64 {
        &self.data[self.offset(i[0], i[1], i[2], i[3])]
    }
}

impl IndexMut<[usize; 4]> for Tensor4 {
    #[inline]
    fn index_mut(&mut self, i: [usize; 4]) -> &mut f64 {
        let o = self.offset(i[0], i[1], i[2], i[3]);
        &mut self.data[o]
    }
}

/// Eigen-decomposition of a symmetric matrix, ascending eigenvalues.
pub fn sym_eigen(m: &DMatrix<f64>) -> (DVector<f64>, DMatrix<f64>) {
    let n = m.nrows();
    let sym = (m + m.transpose()) * 0.5;
    let eig = sym.symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let vals = DVector::from_iterator(n, order.iter().map(|&i| eig.eigenvalues[i]));
    let mut vecs = DMatrix::zeros(n, n);
    for (k, &i) in order.iter().enumerate() {
        vecs.set_column(k, &eig.eigenvectors.column(i));
    }
    (vals, vecs)
}

/// Solve `A c = S c e` for symmetric `A` and SPD `S`; `Cᵀ S C = 1`.
pub fn sym_gen_eigen(a: &DMatrix<f64>, s: &DMatrix<f64>) -> Result<(DVector<f64>, DMatrix<f64>)> {
    let chol = s
        .clone()
        .cholesky()
        .ok_or_else(|| Error::InvalidParameter("overlap matrix is not positive definite".into()))?;
    let l = chol.l();
    let linv = l
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::InvalidParameter("singular Cholesky factor".into()))?;
    let at = &linv * a * linv.transpose();
    let (vals, vecs) = sym_eigen(&at);
    Ok((vals, linv.transpose() * vecs))
}

/// Matrix exponential (Padé with scaling and squaring).
pub fn expm(m: &DMatrix<f64>) -> DMatrix<f64> {
    m.exp()
}

/// Minimum-norm least-squares solve by SVD, dropping singular values below
/// `rcond · σ_max`. Returns the solution and the number of dropped values.
pub fn pinv_solve(a: &DMatrix<f64>, b: &DVector<f64>, rcond: f64) -> (DVector<f64>, usize) {
    let n = a.ncols();
    if n == 0 {
        return (DVector::zeros(0), 0);
    }
    let svd = a.clone().svd(true, true);
    let u = svd.u.as_ref().expect("U requested");
    let vt = svd.v_t.as_ref().expect("Vt requested");
    let smax = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    let mut x = DVector::zeros(n);
    let mut dropped = 0;
    for (k, &s) in svd.singular_values.iter().enumerate() {
        if s <= rcond * smax || s == 0.0 {
            dropped += 1;
            continue;
        }
        let coef = u.column(k).dot(b) / s;
        x += vt.row(k).transpose() * coef;
    }
    (x, dropped)
}

pub fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0, |a, x| a.max(x.abs()))
}

/// `‖Cᵀ S C − 1‖_max`.
pub fn orthonormality_error(c: &DMatrix<f64>, s: &DMatrix<f64>) -> f64 {
    let m = c.transpose() * s * c;
    max_abs(&(m - DMatrix::identity(c.ncols(), c.ncols())))
}
