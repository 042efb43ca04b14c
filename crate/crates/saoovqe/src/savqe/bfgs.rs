use nalgebra::{DMatrix, DVector};
use serde::Serialize;

/// Stopping rule and limits for [`minimize`].
#[derive(Clone, Copy, Debug)]
pub struct BfgsOptions {
    /// Stop once the accepted-step change in `f` is below this ...
    pub f_tol: f64,
    /// ... and `max|∇f|` is below this.
    pub g_tol: f64,
    pub max_iter: usize,
    /// Cap on `max|Δx|` per step.
    pub max_step: f64,
}

impl Default for BfgsOptions {
    fn default() -> Self {
        BfgsOptions { f_tol: 1e-8, g_tol: 1e-8, max_iter: 500, max_step: 0.5 }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct BfgsResult {
    pub x: Vec<f64>,
    pub f: f64,
    pub grad: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
    /// `f` after every accepted step, starting with `f(x0)`.
    pub trace: Vec<f64>,
}

fn amax(v: &DVector<f64>) -> f64 {
    v.amax()
}

/// Quasi-Newton minimization with an inverse-Hessian BFGS update and an
/// Armijo backtracking line search. `fg` returns `(f, ∇f)`.
pub fn minimize<E>(mut fg: impl FnMut(&[f64]) -> Result<(f64, Vec<f64>), E>, x0: &[f64], opts: &BfgsOptions) -> Result<BfgsResult, E> {
    let n = x0.len();
    let mut x = DVector::from_column_slice(x0);
    let (mut f, g0) = fg(x.as_slice())?;
    let mut g = DVector::from_vec(g0);
    let mut hinv = DMatrix::<f64>::identity(n, n);
    let mut trace = vec![f];
    let mut iterations = 0;
    let mut converged = n == 0 || amax(&g) < opts.g_tol;
    let mut fresh = true;
    while !converged && iterations < opts.max_iter {
        iterations += 1;
        let mut p = -(&hinv * &g);
        if p.dot(&g) >= 0.0 {
            hinv = DMatrix::identity(n, n);
            p = -g.clone();
        }
        let pmax = p.amax();
        if pmax > opts.max_step {
            p *= opts.max_step / pmax;
        }
        let slope = p.dot(&g);
        let mut alpha = 1.0;
        let mut accepted = None;
        for _ in 0..40 {
            let xn = &x + &p * alpha;
            let (fnew, gnew) = fg(xn.as_slice())?;
            let gnew = DVector::from_vec(gnew);
            // below the rounding floor of f, a smaller gradient decides
            let flat = fnew - f <= 16.0 * f64::EPSILON * f.abs().max(1.0) && gnew.norm() < g.norm();
            if fnew <= f + 1e-4 * alpha * slope || flat {
                accepted = Some((xn, fnew, gnew));
                break;
            }
            alpha *= 0.5;
        }
        let Some((xn, fnew, gn)) = accepted else {
            if fresh {
                // no descent even along −∇f: f is flat to rounding here
                converged = amax(&g) < opts.g_tol.max(1e-6);
                break;
            }
            hinv = DMatrix::identity(n, n);
            fresh = true;
            continue;
        };
        let s = &xn - &x;
        let y = &gn - &g;
        let sy = s.dot(&y);
        if sy > 1e-14 * s.norm() * y.norm() {
            if fresh {
                // Shanno scaling of the first inverse-Hessian guess
                hinv *= sy / y.dot(&y);
            }
            let rho = 1.0 / sy;
            let i = DMatrix::<f64>::identity(n, n);
            let a = &i - &s * y.transpose() * rho;
            hinv = &a * &hinv * a.transpose() + &s * s.transpose() * rho;
            fresh = false;
        }
        let df = (f - fnew).abs();
        x = xn;
        f = fnew;
        g = gn;
        trace.push(f);
        converged = amax(&g) < opts.g_tol && df < opts.f_tol;
    }
    Ok(BfgsResult { x: x.iter().copied().collect(), f, grad: g.iter().copied().collect(), iterations, converged, trace })
}
