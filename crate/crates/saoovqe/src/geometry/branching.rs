use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};

/// Below this fraction of `|h|` the coupling adds no second direction.
const DEPENDENT: f64 = 1e-11;

/// The two directions that lift the degeneracy, and the projector onto
/// their complement.
#[derive(Clone, Debug, Serialize)]
pub struct BranchingSpace {
    /// `½(∇E1 − ∇E0)`
    pub g_diff: Vec<f64>,
    /// `(E1 − E0)·D^CI`
    pub h_vec: Vec<f64>,
    #[serde(skip)]
    pub projector: DMatrix<f64>,
    /// Rank of the removed subspace, 1 when `h` is parallel to `g` or zero.
    pub rank: usize,
}

/// Worst violations of the projector algebra.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct ProjectorErrors {
    pub symmetry: f64,
    pub idempotence: f64,
    /// `max(|P·g̃|, |P·h̃|)`
    pub annihilation: f64,
}

impl ProjectorErrors {
    pub fn max(&self) -> f64 {
        self.symmetry.max(self.idempotence).max(self.annihilation)
    }
}

impl BranchingSpace {
    pub fn new(g_diff: &[f64], h_vec: &[f64]) -> Result<Self> {
        let n = g_diff.len();
        if h_vec.len() != n {
            return Err(Error::DimensionMismatch(format!("g has {n} components, h {}", h_vec.len())));
        }
        let g = DVector::from_column_slice(g_diff);
        let gn = g.norm();
        if gn == 0.0 || !gn.is_finite() {
            return Err(Error::InvalidParameter("gradient difference vanishes".into()));
        }
        let u = &g / gn;
        let h = DVector::from_column_slice(h_vec);
        let w = &h - &u * u.dot(&h);
        let mut p = DMatrix::identity(n, n) - &u * u.transpose();
        let mut rank = 1;
        if h.norm() > 0.0 && w.norm() > DEPENDENT * h.norm() {
            // second Gram-Schmidt pass for nearly parallel g and h
            let v = &w / w.norm();
            let v = &v - &u * u.dot(&v);
            let v = &v / v.norm();
            p -= &v * v.transpose();
            rank = 2;
        }
        Ok(BranchingSpace { g_diff: g_diff.to_vec(), h_vec: h_vec.to_vec(), projector: p, rank })
    }

    pub fn project(&self, v: &[f64]) -> Vec<f64> {
        (&self.projector * DVector::from_column_slice(v)).iter().copied().collect()
    }

    pub fn errors(&self) -> ProjectorErrors {
        let p = &self.projector;
        let unit = |v: &[f64]| {
            let d = DVector::from_column_slice(v);
            let n = d.norm();
            if n > 0.0 {
                d / n
            } else {
                d
            }
        };
        ProjectorErrors {
            symmetry: (p - p.transpose()).amax(),
            idempotence: (p * p - p).amax(),
            annihilation: (p * unit(&self.g_diff)).amax().max((p * unit(&self.h_vec)).amax()),
        }
    }
}
