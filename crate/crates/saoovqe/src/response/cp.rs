use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::pinv_solve;

/// Singular values below this fraction of the largest are dropped.
pub const CP_RCOND: f64 = 1e-9;

/// Absolute residual accepted when the right-hand side itself is noise.
pub const CP_NOISE_RESIDUAL: f64 = 1e-12;

/// Hessian blocks of the state-averaged energy at the converged point.
#[derive(Clone, Debug)]
pub struct ResponseSystem {
    /// Orbital-orbital, over the non-redundant pairs.
    pub h_oo: DMatrix<f64>,
    pub h_cc: DMatrix<f64>,
    /// `n_params × n_pairs`; the orbital-circuit block is its transpose.
    pub h_co: DMatrix<f64>,
}

/// Which quantity the multipliers make stationary.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RhsKind {
    Gradient(usize),
    Nac(usize, usize),
}

#[derive(Clone, Debug, Serialize)]
pub struct Multipliers {
    pub kind: RhsKind,
    pub kappa_bar: Vec<f64>,
    pub theta_bar: Vec<f64>,
    /// Fixed at −1/4 for couplings; it multiplies the resolution condition,
    /// which does not enter the frozen-vector coupling numerator.
    pub phi_bar: Option<f64>,
    /// `|A·x − b|`.
    pub residual: f64,
    /// `|A·x − b| / |b|`; only meaningful when `b` is above noise level.
    pub relative_residual: f64,
    /// Singular values dropped by the pseudo-inverse.
    pub dropped: usize,
    pub least_squares: bool,
}

impl Multipliers {
    /// Relative residual below 1e-10, or an absolute one below
    /// [`CP_NOISE_RESIDUAL`] for a right-hand side at rounding level.
    pub fn solved(&self) -> bool {
        self.relative_residual < 1e-10 || self.residual < CP_NOISE_RESIDUAL
    }
}

impl ResponseSystem {
    pub fn n_pairs(&self) -> usize {
        self.h_oo.nrows()
    }

    pub fn n_params(&self) -> usize {
        self.h_cc.nrows()
    }

    pub fn check(&self) -> Result<()> {
        let (no, nc) = (self.n_pairs(), self.n_params());
        if !self.h_oo.is_square() || !self.h_cc.is_square() || self.h_co.shape() != (nc, no) {
            return Err(Error::DimensionMismatch(format!(
                "blocks {:?}, {:?}, {:?}",
                self.h_oo.shape(),
                self.h_cc.shape(),
                self.h_co.shape()
            )));
        }
        Ok(())
    }

    /// `[[H^OO, H^OC], [H^CO, H^CC]]`.
    pub fn matrix(&self) -> DMatrix<f64> {
        let (no, nc) = (self.n_pairs(), self.n_params());
        let mut a = DMatrix::zeros(no + nc, no + nc);
        a.view_mut((0, 0), (no, no)).copy_from(&self.h_oo);
        a.view_mut((no, no), (nc, nc)).copy_from(&self.h_cc);
        a.view_mut((no, 0), (nc, no)).copy_from(&self.h_co);
        a.view_mut((0, no), (no, nc)).copy_from(&self.h_co.transpose());
        a
    }
}

/// Solve `A·[κ̄; θ̄] = −[g_o; g_c]` by pseudo-inverse.
pub fn solve_coupled_perturbed(sys: &ResponseSystem, kind: RhsKind, g_o: &[f64], g_c: &[f64]) -> Result<Multipliers> {
    sys.check()?;
    let (no, nc) = (sys.n_pairs(), sys.n_params());
    if g_o.len() != no || g_c.len() != nc {
        return Err(Error::DimensionMismatch(format!("rhs {}+{} for system {no}+{nc}", g_o.len(), g_c.len())));
    }
    let a = sys.matrix();
    let b = -DVector::from_iterator(no + nc, g_o.iter().chain(g_c).copied());
    let (x, dropped) = pinv_solve(&a, &b, CP_RCOND);
    let residual = (&a * &x - &b).norm();
    let relative_residual = if b.norm() > 0.0 { residual / b.norm() } else { 0.0 };
    Ok(Multipliers {
        kind,
        kappa_bar: x.rows(0, no).iter().copied().collect(),
        theta_bar: x.rows(no, nc).iter().copied().collect(),
        phi_bar: matches!(kind, RhsKind::Nac(..)).then_some(-0.25),
        residual,
        relative_residual,
        dropped,
        least_squares: dropped > 0,
    })
}
