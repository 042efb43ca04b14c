use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use saoovqe::sim::{Pauli, PauliString, PauliSum, StateVector};

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn single(p: Pauli) -> DMatrix<Complex64> {
    match p {
        Pauli::I => DMatrix::from_row_slice(2, 2, &[c(1., 0.), c(0., 0.), c(0., 0.), c(1., 0.)]),
        Pauli::X => DMatrix::from_row_slice(2, 2, &[c(0., 0.), c(1., 0.), c(1., 0.), c(0., 0.)]),
        Pauli::Y => DMatrix::from_row_slice(2, 2, &[c(0., 0.), c(0., -1.), c(0., 1.), c(0., 0.)]),
        Pauli::Z => DMatrix::from_row_slice(2, 2, &[c(1., 0.), c(0., 0.), c(0., 0.), c(-1., 0.)]),
    }
}

/// Kronecker product with qubit 0 as the most significant factor.
pub fn kron_all(ms: &[DMatrix<Complex64>]) -> DMatrix<Complex64> {
    let mut out = DMatrix::from_element(1, 1, c(1., 0.));
    for m in ms {
        out = out.kronecker(m);
    }
    out
}

pub fn pauli_matrix(s: &PauliString) -> DMatrix<Complex64> {
    kron_all(&s.ops().into_iter().map(single).collect::<Vec<_>>())
}

pub fn sum_matrix(op: &PauliSum) -> DMatrix<Complex64> {
    let dim = 1 << op.n_qubits();
    let mut m = DMatrix::zeros(dim, dim);
    for (s, k) in op.terms() {
        m += pauli_matrix(s) * *k;
    }
    m
}

/// Embed a one-qubit gate matrix on qubit `q` of `n`.
pub fn one_qubit(n: usize, q: usize, u: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let id = single(Pauli::I);
    kron_all(&(0..n).map(|k| if k == q { u.clone() } else { id.clone() }).collect::<Vec<_>>())
}

/// Controlled-`u` as |0⟩⟨0|⊗1 + |1⟩⟨1|⊗u.
pub fn controlled(n: usize, ctrl: usize, tgt: usize, u: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let id = single(Pauli::I);
    let p0 = DMatrix::from_row_slice(2, 2, &[c(1., 0.), c(0., 0.), c(0., 0.), c(0., 0.)]);
    let p1 = DMatrix::from_row_slice(2, 2, &[c(0., 0.), c(0., 0.), c(0., 0.), c(1., 0.)]);
    let a = kron_all(&(0..n).map(|k| if k == ctrl { p0.clone() } else { id.clone() }).collect::<Vec<_>>());
    let b = kron_all(
        &(0..n)
            .map(|k| {
                if k == ctrl {
                    p1.clone()
                } else if k == tgt {
                    u.clone()
                } else {
                    id.clone()
                }
            })
            .collect::<Vec<_>>(),
    );
    a + b
}

pub fn random_string(rng: &mut impl Rng, n: usize) -> PauliString {
    let ops: Vec<Pauli> = (0..n)
        .map(|_| [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z][rng.gen_range(0..4)])
        .collect();
    PauliString::from_ops(&ops)
}

pub fn random_state(rng: &mut impl Rng, n: usize) -> StateVector {
    let amps: Vec<Complex64> = (0..1 << n)
        .map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    let mut s = StateVector::from_amplitudes(n, amps).unwrap();
    s.normalize();
    s
}

pub fn random_hermitian(rng: &mut impl Rng, n: usize, terms: usize) -> PauliSum {
    let mut op = PauliSum::zero(n);
    for _ in 0..terms {
        op.add_term(random_string(rng, n), c(rng.gen_range(-1.0..1.0), 0.0));
    }
    op
}

pub fn vec_of(s: &StateVector) -> DVector<Complex64> {
    DVector::from_column_slice(s.amplitudes())
}

pub fn max_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}
