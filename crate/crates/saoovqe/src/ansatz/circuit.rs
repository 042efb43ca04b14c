use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::GeneratorSet;
use crate::error::{Error, Result};
use crate::sim::{PauliString, SparseOperator, StateVector};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// How each generator exponential is put on the register.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Realization {
    /// `exp(θ_j G_j)` applied exactly (Taylor series on the sparse image).
    #[default]
    Exact,
    /// `Π_x exp(iθ_j c_x P_x)` over the Pauli strings of `G_j`. Exact only
    /// when the strings commute, which spin-free generators generally do not.
    PauliProduct,
}

#[derive(Clone, Debug)]
enum Kind {
    Generator,
    /// `exp(iθc P)`
    Pauli { c: f64, p: PauliString },
}

#[derive(Clone, Debug)]
struct Factor {
    param: usize,
    kind: Kind,
}

/// Single Trotter step over the generators in enumeration order.
#[derive(Clone, Debug)]
pub struct Ansatz {
    set: GeneratorSet,
    realization: Realization,
    factors: Vec<Factor>,
    norms: Vec<f64>,
}

impl Ansatz {
    pub fn new(set: GeneratorSet, realization: Realization) -> Self {
        let mut factors = Vec::new();
        for (j, g) in set.generators.iter().enumerate() {
            match realization {
                Realization::Exact => factors.push(Factor { param: j, kind: Kind::Generator }),
                Realization::PauliProduct => {
                    for (c, p) in g.factors() {
                        factors.push(Factor { param: j, kind: Kind::Pauli { c, p } });
                    }
                }
            }
        }
        let norms = set.generators.iter().map(|g| g.sparse.norm1()).collect();
        Ansatz { set, realization, factors, norms }
    }

    pub fn generators(&self) -> &GeneratorSet {
        &self.set
    }

    pub fn realization(&self) -> Realization {
        self.realization
    }

    pub fn n_params(&self) -> usize {
        self.set.len()
    }

    pub fn n_qubits(&self) -> usize {
        self.set.n_qubits()
    }

    pub fn n_factors(&self) -> usize {
        self.factors.len()
    }

    /// Pauli factors as `(param, weight, P)` meaning `exp(−i·weight·θ/2·P)`,
    /// i.e. the gate list of the Pauli-product circuit.
    pub fn pauli_factors(&self) -> Vec<(usize, f64, PauliString)> {
        let mut out = Vec::new();
        for (j, g) in self.set.generators.iter().enumerate() {
            for (c, p) in g.factors() {
                out.push((j, -2.0 * c, p));
            }
        }
        out
    }

    fn check(&self, theta: &[f64], phi: &StateVector) -> Result<()> {
        if theta.len() != self.n_params() {
            return Err(Error::DimensionMismatch(format!(
                "{} angles for {} parameters",
                theta.len(),
                self.n_params()
            )));
        }
        if phi.n_qubits() != self.n_qubits() {
            return Err(Error::QubitCountMismatch { expected: self.n_qubits(), found: phi.n_qubits() });
        }
        Ok(())
    }

    fn apply_factor(&self, f: usize, theta: &[f64], v: &mut [Complex64]) {
        let fac = &self.factors[f];
        let t = theta[fac.param];
        match &fac.kind {
            Kind::Generator => expm_apply(&self.set.generators[fac.param].sparse, self.norms[fac.param], t, v),
            Kind::Pauli { c, p } => pauli_exp(p, t * c, v),
        }
    }

    /// `D_f v` with `d/dθ` of factor `f` equal to `D_f · factor`.
    fn apply_derivative(&self, f: usize, v: &[Complex64]) -> Vec<Complex64> {
        let fac = &self.factors[f];
        match &fac.kind {
            Kind::Generator => self.set.generators[fac.param].sparse.apply(v),
            Kind::Pauli { c, p } => {
                let mut out = vec![ZERO; v.len()];
                let ic = Complex64::new(0.0, *c);
                for (b, a) in v.iter().enumerate() {
                    let (t, ph) = p.act(b);
                    out[t] += ic * ph * a;
                }
                out
            }
        }
    }

    fn propagate(&self, theta: &[f64], v: &mut [Complex64], from: usize) {
        for f in from..self.factors.len() {
            self.apply_factor(f, theta, v);
        }
    }

    /// `U(θ)|φ⟩`.
    pub fn apply(&self, theta: &[f64], phi: &StateVector) -> Result<StateVector> {
        self.check(theta, phi)?;
        let mut v = phi.amplitudes().to_vec();
        self.propagate(theta, &mut v, 0);
        StateVector::from_amplitudes(self.n_qubits(), v)
    }

    /// Pauli-product circuit with factor `f`'s rotation angle `w·θ` moved by
    /// `delta` for every `(f, delta)` in `shifts` (indices into
    /// [`Ansatz::pauli_factors`]). Only defined for `PauliProduct`.
    pub fn apply_shifted(&self, theta: &[f64], phi: &StateVector, shifts: &[(usize, f64)]) -> Result<StateVector> {
        self.check(theta, phi)?;
        if self.realization != Realization::PauliProduct {
            return Err(Error::InvalidParameter("factor shifts need the pauli_product realization".into()));
        }
        if let Some(&(f, _)) = shifts.iter().find(|(f, _)| *f >= self.factors.len()) {
            return Err(Error::IndexOutOfRange { index: f, limit: self.factors.len() });
        }
        let mut v = phi.amplitudes().to_vec();
        for (f, fac) in self.factors.iter().enumerate() {
            let Kind::Pauli { c, p } = &fac.kind else { unreachable!() };
            // exp(iθcP) = exp(−i(wθ)/2·P), so a shift δ of wθ moves the argument by −δ/2
            let extra: f64 = shifts.iter().filter(|(g, _)| *g == f).map(|(_, d)| -0.5 * d).sum();
            pauli_exp(p, theta[fac.param] * c + extra, &mut v);
        }
        StateVector::from_amplitudes(self.n_qubits(), v)
    }

    /// `U(θ)` as a dense matrix.
    pub fn dense(&self, theta: &[f64]) -> Result<DMatrix<Complex64>> {
        let dim = 1usize << self.n_qubits();
        let mut m = DMatrix::zeros(dim, dim);
        for b in 0..dim {
            let col = self.apply(theta, &StateVector::basis(self.n_qubits(), b))?;
            for (r, a) in col.amplitudes().iter().enumerate() {
                m[(r, b)] = *a;
            }
        }
        Ok(m)
    }

    fn forward(&self, theta: &[f64], phi: &StateVector) -> Vec<Vec<Complex64>> {
        let mut states = Vec::with_capacity(self.factors.len());
        let mut v = phi.amplitudes().to_vec();
        for f in 0..self.factors.len() {
            self.apply_factor(f, theta, &mut v);
            states.push(v.clone());
        }
        states
    }

    /// `U|φ⟩` and every `∂U/∂θ_j |φ⟩`.
    pub fn derivatives(&self, theta: &[f64], phi: &StateVector) -> Result<(Vec<Complex64>, Vec<Vec<Complex64>>)> {
        self.check(theta, phi)?;
        let states = self.forward(theta, phi);
        let dim = phi.amplitudes().len();
        let mut d = vec![vec![ZERO; dim]; self.n_params()];
        for f in 0..self.factors.len() {
            let mut v = self.apply_derivative(f, &states[f]);
            self.propagate(theta, &mut v, f + 1);
            for (a, b) in d[self.factors[f].param].iter_mut().zip(&v) {
                *a += b;
            }
        }
        let psi = states.last().cloned().unwrap_or_else(|| phi.amplitudes().to_vec());
        Ok((psi, d))
    }

    /// `∂²U/∂θ_j∂θ_k |φ⟩` for `j ≤ k`, stored at `[j][k − j]`.
    pub fn second_derivatives(&self, theta: &[f64], phi: &StateVector) -> Result<Vec<Vec<Vec<Complex64>>>> {
        self.check(theta, phi)?;
        let n = self.n_params();
        let dim = phi.amplitudes().len();
        let states = self.forward(theta, phi);
        let mut out: Vec<Vec<Vec<Complex64>>> = (0..n).map(|j| vec![vec![ZERO; dim]; n - j]).collect();
        let mut add = |j: usize, k: usize, v: &[Complex64], w: f64| {
            let (a, b) = if j <= k { (j, k) } else { (k, j) };
            for (x, y) in out[a][b - a].iter_mut().zip(v) {
                *x += w * y;
            }
        };
        for f in 0..self.factors.len() {
            let pf = self.factors[f].param;
            let mut v = self.apply_derivative(f, &states[f]);
            // same factor twice
            let mut vv = self.apply_derivative(f, &v);
            self.propagate(theta, &mut vv, f + 1);
            add(pf, pf, &vv, 1.0);
            for g in f + 1..self.factors.len() {
                self.apply_factor(g, theta, &mut v);
                let pg = self.factors[g].param;
                let mut w = self.apply_derivative(g, &v);
                self.propagate(theta, &mut w, g + 1);
                add(pf, pg, &w, if pf == pg { 2.0 } else { 1.0 });
            }
        }
        Ok(out)
    }
}

/// `v ← exp(i·a·P) v`.
fn pauli_exp(p: &PauliString, a: f64, v: &mut [Complex64]) {
    let (s, c) = a.sin_cos();
    let is = Complex64::new(0.0, s);
    let src = v.to_vec();
    for (b, x) in src.iter().enumerate() {
        v[b] -= (1.0 - c) * x;
        let (t, ph) = p.act(b);
        v[t] += is * ph * x;
    }
}

/// `v ← exp(t·G) v` by a Taylor series, split so each step has `‖tG‖ ≤ ½`.
pub(crate) fn expm_apply(g: &SparseOperator, norm: f64, t: f64, v: &mut [Complex64]) {
    if t == 0.0 || norm == 0.0 {
        return;
    }
    let steps = ((t.abs() * norm) / 0.5).ceil().max(1.0) as usize;
    let h = t / steps as f64;
    let mut term = vec![ZERO; v.len()];
    let mut next = vec![ZERO; v.len()];
    for _ in 0..steps {
        term.copy_from_slice(v);
        for k in 1..64 {
            g.apply_into(&term, &mut next);
            let s = h / k as f64;
            let mut tn = 0.0;
            for (a, b) in term.iter_mut().zip(&next) {
                *a = b * s;
                tn += a.norm_sqr();
            }
            for (x, a) in v.iter_mut().zip(&term) {
                *x += a;
            }
            if tn < 1e-34 {
                break;
            }
        }
    }
}
