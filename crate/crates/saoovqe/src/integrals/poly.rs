/// Quadratic polynomial in the model coordinates.
#[derive(Clone, Debug, Default)]
pub(crate) struct Poly {
    c0: f64,
    lin: Vec<(usize, f64)>,
    quad: Vec<(usize, usize, f64)>,
}

impl Poly {
    pub fn c(c0: f64) -> Self {
        Poly { c0, ..Default::default() }
    }

    /// `c0 + Σ a_k x_k`.
    pub fn lin(c0: f64, terms: &[(usize, f64)]) -> Self {
        Poly { c0, lin: terms.to_vec(), quad: Vec::new() }
    }

    pub fn with_quad(mut self, i: usize, j: usize, a: f64) -> Self {
        self.quad.push((i, j, a));
        self
    }

    pub fn scaled(&self, a: f64) -> Poly {
        Poly {
            c0: a * self.c0,
            lin: self.lin.iter().map(|&(k, c)| (k, a * c)).collect(),
            quad: self.quad.iter().map(|&(i, j, c)| (i, j, a * c)).collect(),
        }
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        let mut v = self.c0;
        for &(k, a) in &self.lin {
            v += a * x[k];
        }
        for &(i, j, a) in &self.quad {
            v += a * x[i] * x[j];
        }
        v
    }

    pub fn deriv(&self, x: &[f64], k: usize) -> f64 {
        let mut d = 0.0;
        for &(i, a) in &self.lin {
            if i == k {
                d += a;
            }
        }
        for &(i, j, a) in &self.quad {
            if i == k {
                d += a * x[j];
            }
            if j == k {
                d += a * x[i];
            }
        }
        d
    }
}
