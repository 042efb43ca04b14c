use std::f64::consts::FRAC_PI_2;

use rayon::prelude::*;

use super::EvalCounter;
use crate::ansatz::Ansatz;
use crate::error::Result;
use crate::sim::{SparseOperator, StateVector};

fn expect(op: &SparseOperator, v: &StateVector) -> f64 {
    let a = v.amplitudes();
    op.sandwich(a, a).re
}

/// `d⟨op⟩/dθ_j = Σ_x (w_x/2)·(⟨op⟩(α_x + π/2) − ⟨op⟩(α_x − π/2))` summed over
/// the Pauli factors `x` of generator `j`, where `α_x = w_x·θ_j` is the
/// factor's rotation angle. Needs the `PauliProduct` realization.
pub fn shift_gradient(
    ansatz: &Ansatz,
    theta: &[f64],
    reference: &StateVector,
    op: &SparseOperator,
    counter: Option<&EvalCounter>,
) -> Result<Vec<f64>> {
    let factors = ansatz.pauli_factors();
    let terms: Vec<(usize, f64)> = (0..factors.len())
        .into_par_iter()
        .map(|x| -> Result<(usize, f64)> {
            let plus = ansatz.apply_shifted(theta, reference, &[(x, FRAC_PI_2)])?;
            let minus = ansatz.apply_shifted(theta, reference, &[(x, -FRAC_PI_2)])?;
            let (j, w, _) = &factors[x];
            Ok((*j, 0.5 * w * (expect(op, &plus) - expect(op, &minus))))
        })
        .collect::<Result<_>>()?;
    if let Some(c) = counter {
        c.add_expectations(2 * factors.len());
    }
    let mut g = vec![0.0; ansatz.n_params()];
    for (j, v) in terms {
        g[j] += v;
    }
    Ok(g)
}

/// `∂²⟨op⟩/∂θ_j∂θ_k` by the four-point double shift
/// `Σ_{x∈j, y∈k} (w_x w_y/4)[f(++) − f(+−) − f(−+) + f(−−)]`.
/// The `x = y` terms are included (a double shift of one factor).
pub fn shift_hessian(
    ansatz: &Ansatz,
    theta: &[f64],
    reference: &StateVector,
    op: &SparseOperator,
    counter: Option<&EvalCounter>,
) -> Result<nalgebra::DMatrix<f64>> {
    let factors = ansatz.pauli_factors();
    let n = ansatz.n_params();
    let nf = factors.len();
    let pairs: Vec<(usize, usize)> =
        (0..nf).flat_map(|x| (x..nf).map(move |y| (x, y))).collect();
    let vals: Vec<(usize, usize, f64)> = pairs
        .par_iter()
        .map(|&(x, y)| -> Result<(usize, usize, f64)> {
            let f = |sx: f64, sy: f64| -> Result<f64> {
                Ok(expect(op, &ansatz.apply_shifted(theta, reference, &[(x, sx * FRAC_PI_2), (y, sy * FRAC_PI_2)])?))
            };
            let d = f(1.0, 1.0)? - f(1.0, -1.0)? - f(-1.0, 1.0)? + f(-1.0, -1.0)?;
            let mult = if x == y { 1.0 } else { 2.0 };
            Ok((factors[x].0, factors[y].0, 0.25 * factors[x].1 * factors[y].1 * d * mult))
        })
        .collect::<Result<_>>()?;
    if let Some(c) = counter {
        c.add_expectations(4 * pairs.len());
    }
    let mut h = nalgebra::DMatrix::zeros(n, n);
    for (j, k, v) in vals {
        if j == k {
            h[(j, j)] += v;
        } else {
            // the doubled off-diagonal factor pair is split over (j,k) and (k,j)
            h[(j, k)] += 0.5 * v;
            h[(k, j)] += 0.5 * v;
        }
    }
    Ok(h)
}
