use num_complex::Complex64;
use serde::Serialize;

use super::Ensemble;
use crate::error::{Error, Result};
use crate::sim::SparseOperator;

/// Outcome of the final rotation within the converged two-state subspace.
#[derive(Clone, Debug, Serialize)]
pub struct Resolution {
    pub phi: f64,
    pub e0: f64,
    pub e1: f64,
    /// `E(φ) = a + b·cos 2φ + c·sin 2φ`
    pub fit: [f64; 3],
    /// `b = c = 0`: the two states are degenerate and `φ* = 0` was taken.
    pub degenerate: bool,
}

/// `cos φ·A + sin φ·B`
pub fn rotate_pair(a: &[Complex64], b: &[Complex64], phi: f64) -> Vec<Complex64> {
    let (s, c) = phi.sin_cos();
    a.iter().zip(b).map(|(x, y)| x * c + y * s).collect()
}

/// Resolved states `Ψ0 = cos φ·Ψ_A + sin φ·Ψ_B`, `Ψ1 = −sin φ·Ψ_A + cos φ·Ψ_B`.
pub fn resolved_states(a: &[Complex64], b: &[Complex64], phi: f64) -> [Vec<Complex64>; 2] {
    [rotate_pair(a, b, phi), rotate_pair(a, b, phi + std::f64::consts::FRAC_PI_2)]
}

/// Fit `E0(φ)` from φ = 0, π/4, π/2 and take its minimum in closed form.
pub fn resolve_states(ens: &Ensemble, theta: &[f64], h: &SparseOperator) -> Result<Resolution> {
    if (ens.weights[0] - ens.weights[1]).abs() > 1e-12 {
        return Err(Error::UnequalWeights);
    }
    let [a, b] = ens.states(theta)?;
    let e = |phi: f64| {
        let v = rotate_pair(&a, &b, phi);
        h.sandwich(&v, &v).re
    };
    let (e_0, e_q, e_h) = (e(0.0), e(std::f64::consts::FRAC_PI_4), e(std::f64::consts::FRAC_PI_2));
    let fa = 0.5 * (e_0 + e_h);
    let fb = 0.5 * (e_0 - e_h);
    let fc = e_q - fa;
    let amp = fb.hypot(fc);
    let scale = fa.abs().max(1.0);
    if amp < 1e-13 * scale {
        return Ok(Resolution { phi: 0.0, e0: fa, e1: fa, fit: [fa, fb, fc], degenerate: true });
    }
    let phi = 0.5 * (-fc).atan2(-fb);
    Ok(Resolution { phi, e0: fa - amp, e1: fa + amp, fit: [fa, fb, fc], degenerate: false })
}
