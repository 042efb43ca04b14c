//! Dense second-quantized operators built from bit strings.
use nalgebra::DMatrix;

/// Annihilators `a_j` on `nq` modes; mode `j` is bit `nq-1-j` and the sign
/// counts occupied modes `< j`.
pub fn annihilators(nq: usize) -> Vec<DMatrix<f64>> {
    let dim = 1usize << nq;
    (0..nq)
        .map(|j| {
            let mut m = DMatrix::zeros(dim, dim);
            for b in 0..dim {
                if (b >> (nq - 1 - j)) & 1 == 1 {
                    let before = (0..j).filter(|&k| (b >> (nq - 1 - k)) & 1 == 1).count();
                    let s = if before % 2 == 0 { 1.0 } else { -1.0 };
                    m[(b ^ (1 << (nq - 1 - j)), b)] = s;
                }
            }
            m
        })
        .collect()
}

pub struct Fock {
    pub n: usize,
    a: Vec<DMatrix<f64>>,
}

impl Fock {
    /// `n` spatial orbitals, interleaved spins.
    pub fn new(n: usize) -> Self {
        Fock { n, a: annihilators(2 * n) }
    }

    pub fn dim(&self) -> usize {
        1 << (2 * self.n)
    }

    pub fn a(&self, j: usize) -> &DMatrix<f64> {
        &self.a[j]
    }

    pub fn e1(&self, p: usize, q: usize) -> DMatrix<f64> {
        (0..2).map(|s| self.a[2 * p + s].transpose() * &self.a[2 * q + s]).fold(DMatrix::zeros(self.dim(), self.dim()), |x, y| x + y)
    }

    pub fn e2(&self, t: usize, u: usize, v: usize, w: usize) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.dim(), self.dim());
        for s in 0..2 {
            for r in 0..2 {
                m += self.a[2 * t + s].transpose() * self.a[2 * v + r].transpose() * &self.a[2 * w + r] * &self.a[2 * u + s];
            }
        }
        m
    }

    pub fn number(&self) -> DMatrix<f64> {
        (0..2 * self.n).map(|j| self.a[j].transpose() * &self.a[j]).fold(DMatrix::zeros(self.dim(), self.dim()), |x, y| x + y)
    }

    pub fn sz(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.dim(), self.dim());
        for p in 0..self.n {
            m += 0.5 * (self.a[2 * p].transpose() * &self.a[2 * p] - self.a[2 * p + 1].transpose() * &self.a[2 * p + 1]);
        }
        m
    }

    /// Basis index of the determinant with the listed modes occupied.
    pub fn det(&self, occ: &[usize]) -> usize {
        let nq = 2 * self.n;
        occ.iter().fold(0, |b, &q| b | 1 << (nq - 1 - q))
    }
}
