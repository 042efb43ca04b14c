use nalgebra::DMatrix;
use rand::Rng;
use saoovqe::linalg::Tensor4;

pub fn random_symmetric(rng: &mut impl Rng, n: usize, scale: f64) -> DMatrix<f64> {
    let a = DMatrix::from_fn(n, n, |_, _| rng.gen_range(-1.0..1.0) * scale);
    (&a + a.transpose()) * 0.5
}

pub fn random_eri(rng: &mut impl Rng, n: usize, scale: f64) -> Tensor4 {
    let mut g = Tensor4::zeros(n);
    for p in 0..n {
        for q in 0..=p {
            for r in 0..n {
                for s in 0..=r {
                    if p * (p + 1) / 2 + q >= r * (r + 1) / 2 + s {
                        g.set_sym8(p, q, r, s, rng.gen_range(-1.0..1.0) * scale);
                    }
                }
            }
        }
    }
    g
}

/// Random orthogonal matrix from the QR of a Gaussian-ish matrix.
pub fn random_orthogonal(rng: &mut impl Rng, n: usize) -> DMatrix<f64> {
    let a = DMatrix::from_fn(n, n, |_, _| rng.gen_range(-1.0..1.0));
    a.qr().q()
}
