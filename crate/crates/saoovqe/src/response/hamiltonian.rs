use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::integrals::{symmetrize, symmetrize8, CoordinateDerivative, DerivativeIntegralSet, IntegralSet};
use crate::linalg::Tensor4;

/// MO-basis derivative integrals for one nuclear coordinate, with the
/// orbitals following the coordinate through symmetric orthonormalization.
#[derive(Clone, Debug)]
pub struct DerivativeHamiltonian {
    pub label: String,
    pub dh: DMatrix<f64>,
    pub dg: Tensor4,
    pub de_nuc: f64,
    /// `T_pq = Σ C_μp (∂μ|ν) C_νq`, for the CSF term.
    pub t_half: DMatrix<f64>,
    /// `S^(x)` in the MO basis.
    pub s_x: DMatrix<f64>,
}

/// `∂h = Cᵀh^(x)C − ½{S^(x), h}` and
/// `∂g_pqrs = (g^(x))_pqrs − ½Σ_o [S_po g_oqrs + S_qo g_pors + S_ro g_pqos + S_so g_pqro]`.
pub fn hamiltonian_nuclear_derivative(ints: &IntegralSet, c: &DMatrix<f64>, d: &CoordinateDerivative, label: &str) -> Result<DerivativeHamiltonian> {
    let n = ints.n_ao();
    if d.h_x.shape() != (n, n) || d.g_x.dim() != n || d.t_half.shape() != (n, n) || c.nrows() != n {
        return Err(Error::DimensionMismatch(format!("derivative integrals for {} AOs, system has {n}", d.h_x.nrows())));
    }
    let m = c.ncols();
    let h = c.transpose() * &ints.h_ao * c;
    let g = ints.g_ao.transform_rect(c);
    let s = c.transpose() * d.s_x() * c;
    let dh = c.transpose() * &d.h_x * c - (&s * &h + &h * &s) * 0.5;
    let gx = d.g_x.transform_rect(c);
    let dg = Tensor4::from_fn(m, |p, q, r, t| {
        let mut resp = 0.0;
        for o in 0..m {
            resp += s[(p, o)] * g[[o, q, r, t]] + s[(q, o)] * g[[p, o, r, t]] + s[(r, o)] * g[[p, q, o, t]] + s[(t, o)] * g[[p, q, r, o]];
        }
        gx[[p, q, r, t]] - 0.5 * resp
    });
    Ok(DerivativeHamiltonian {
        label: label.to_string(),
        dh: symmetrize(&dh),
        dg: symmetrize8(&dg),
        de_nuc: d.de_nuc,
        t_half: c.transpose() * &d.t_half * c,
        s_x: s,
    })
}

/// One [`DerivativeHamiltonian`] per coordinate.
pub fn derivative_hamiltonians(ints: &IntegralSet, c: &DMatrix<f64>, derivs: &DerivativeIntegralSet) -> Result<Vec<DerivativeHamiltonian>> {
    if derivs.n_ao != ints.n_ao() {
        return Err(Error::DimensionMismatch(format!("derivative file has {} AOs, system {}", derivs.n_ao, ints.n_ao())));
    }
    derivs
        .coords
        .iter()
        .enumerate()
        .map(|(k, d)| {
            let label = derivs.labels.get(k).cloned().unwrap_or_else(|| format!("x{k}"));
            hamiltonian_nuclear_derivative(ints, c, d, &label)
        })
        .collect()
}
