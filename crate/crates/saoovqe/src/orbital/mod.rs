//! Generalized Fock matrices, orbital gradient and Hessian, Newton steps.
//!
//! Orbital rotations act as `C' = C·exp(−K)` with `K_pq = κ_pq` for `p > q`
//! and `K_qp = −κ_pq`. RDMs passed here are full MO-space (frozen part
//! completed) unless noted.

mod fock;
mod hessian;

pub use fock::{fock_matrices, generalized_fock, orbital_gradient, FockMatrices};
pub use hessian::orbital_hessian;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::integrals::Partition;
use crate::linalg::{expm, pinv_solve, sym_eigen};

/// Non-redundant rotation pairs `(p, q)` with `p > q`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PairMask {
    pub n_mo: usize,
    pub pairs: Vec<(usize, usize)>,
}

impl PairMask {
    /// Frozen–frozen and virtual–virtual pairs are always dropped;
    /// active–active pairs unless `unmask_active` is set.
    pub fn new(partition: &Partition, unmask_active: bool) -> Self {
        let n = partition.n_mo();
        let mut pairs = Vec::new();
        for p in 0..n {
            for q in 0..p {
                let (cp, cq) = (partition.class_of(p), partition.class_of(q));
                let keep = match (cp, cq) {
                    (0, 0) | (2, 2) => false,
                    (1, 1) => unmask_active,
                    _ => true,
                };
                if keep {
                    pairs.push((p, q));
                }
            }
        }
        PairMask { n_mo: n, pairs }
    }

    /// Every `p > q` pair.
    pub fn all(n_mo: usize) -> Self {
        let pairs = (0..n_mo).flat_map(|p| (0..p).map(move |q| (p, q))).collect();
        PairMask { n_mo, pairs }
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// Antisymmetric `K` from pair amplitudes.
    pub fn to_matrix(&self, kappa: &[f64]) -> DMatrix<f64> {
        let mut k = DMatrix::zeros(self.n_mo, self.n_mo);
        for (&(p, q), &v) in self.pairs.iter().zip(kappa) {
            k[(p, q)] = v;
            k[(q, p)] = -v;
        }
        k
    }

    /// `m_pq` over the pairs.
    pub fn gather(&self, m: &DMatrix<f64>) -> Vec<f64> {
        self.pairs.iter().map(|&(p, q)| m[(p, q)]).collect()
    }

    pub fn labels(&self) -> Vec<String> {
        self.pairs.iter().map(|(p, q)| format!("{p}-{q}")).collect()
    }
}

/// `C·exp(−K)`.
pub fn rotate_orbitals(c: &DMatrix<f64>, k: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    if k.nrows() != c.ncols() || !k.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "K is {}x{}, C has {} columns",
            k.nrows(),
            k.ncols(),
            c.ncols()
        )));
    }
    Ok(c * expm(&(-k)))
}

#[derive(Clone, Debug)]
pub struct NewtonStep {
    pub kappa: Vec<f64>,
    /// Level shift added to the Hessian diagonal.
    pub shift: f64,
    /// Hessian was numerically singular; pseudo-inverse used.
    pub least_squares: bool,
    /// Step was scaled down to `max_step`.
    pub truncated: bool,
}

/// Solve `(H + λ)κ = −g` with the smallest `λ ≥ 0` making `H + λ` positive
/// definite (plus a small margin), then cap `max|κ|` at `max_step`.
pub fn newton_step(grad: &[f64], hess: &DMatrix<f64>, max_step: f64) -> Result<NewtonStep> {
    let n = grad.len();
    if hess.shape() != (n, n) {
        return Err(Error::DimensionMismatch(format!("gradient {n}, Hessian {:?}", hess.shape())));
    }
    if n == 0 {
        return Ok(NewtonStep { kappa: Vec::new(), shift: 0.0, least_squares: false, truncated: false });
    }
    let g = DVector::from_column_slice(grad);
    if g.amax() == 0.0 {
        return Ok(NewtonStep { kappa: vec![0.0; n], shift: 0.0, least_squares: false, truncated: false });
    }
    let (evals, _) = sym_eigen(hess);
    let scale = evals.amax().max(1e-300);
    let lmin = evals.min();
    let tiny = 1e-10 * scale;
    let (shift, least_squares) = if lmin > tiny {
        (0.0, false)
    } else if lmin < -tiny {
        (-lmin + 1e-4 * scale.max(1.0), false)
    } else {
        (0.0, true)
    };
    let a = hess + DMatrix::identity(n, n) * shift;
    let x = if least_squares {
        pinv_solve(&a, &(-&g), 1e-10).0
    } else {
        a.clone().cholesky().map(|c| c.solve(&(-&g))).unwrap_or_else(|| pinv_solve(&a, &(-&g), 1e-12).0)
    };
    let big = x.amax();
    let truncated = big > max_step;
    let x = if truncated { x * (max_step / big) } else { x };
    Ok(NewtonStep { kappa: x.iter().copied().collect(), shift, least_squares, truncated })
}
