use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::formaldimine::{build_formaldimine, internal_jacobian};
use crate::error::{Error, Result};
use crate::integrals::{DerivativeIntegralSet, FileSource, IntegralSet, ModelSystem};
use crate::response::{derivative_hamiltonians, ResponseContext, DEGENERATE_GAP};
use crate::savqe::{run_sa_oo_vqe, SaOoVqeOptions, SaOoVqeResult, WarmStart};

/// Integrals and derivative integrals per point of a coordinate space.
pub trait IntegralSource: Sync {
    fn n_coords(&self) -> usize;
    fn labels(&self) -> Vec<String>;
    fn load(&self, x: &[f64]) -> Result<(IntegralSet, DerivativeIntegralSet)>;
}

impl IntegralSource for ModelSystem {
    fn n_coords(&self) -> usize {
        ModelSystem::n_coords(self)
    }

    fn labels(&self) -> Vec<String> {
        self.info.labels.clone()
    }

    fn load(&self, x: &[f64]) -> Result<(IntegralSet, DerivativeIntegralSet)> {
        Ok((self.integrals(x)?, self.derivatives(x)?))
    }
}

impl IntegralSource for FileSource {
    fn n_coords(&self) -> usize {
        self.index.entries.values().next().map_or(0, |c| c.len())
    }

    fn labels(&self) -> Vec<String> {
        (0..self.n_coords()).map(|k| format!("x{k}")).collect()
    }

    fn load(&self, x: &[f64]) -> Result<(IntegralSet, DerivativeIntegralSet)> {
        FileSource::load(self, x)
    }
}

/// How the optimizer's coordinates `q` map onto the source's coordinates.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum CoordinateMap {
    /// Source coordinates `free` vary; the others stay at `base`.
    Subset { base: Vec<f64>, free: Vec<usize> },
    /// `(α, φ)` in degrees to formaldimine Cartesians in Å.
    Formaldimine,
}

impl CoordinateMap {
    /// Every coordinate of an `n`-dimensional source.
    pub fn all(n: usize) -> Self {
        CoordinateMap::Subset { base: vec![0.0; n], free: (0..n).collect() }
    }

    pub fn dim(&self) -> usize {
        match self {
            CoordinateMap::Subset { free, .. } => free.len(),
            CoordinateMap::Formaldimine => 2,
        }
    }

    pub fn labels(&self, source: &dyn IntegralSource) -> Vec<String> {
        match self {
            CoordinateMap::Subset { free, .. } => {
                let l = source.labels();
                free.iter().map(|&k| l.get(k).cloned().unwrap_or_else(|| format!("x{k}"))).collect()
            }
            CoordinateMap::Formaldimine => vec!["alpha".into(), "phi".into()],
        }
    }

    pub fn check(&self, source: &dyn IntegralSource) -> Result<()> {
        let n = source.n_coords();
        match self {
            CoordinateMap::Subset { base, free } => {
                if base.len() != n {
                    return Err(Error::DimensionMismatch(format!("base point has {} coordinates, source {n}", base.len())));
                }
                if let Some(&k) = free.iter().find(|&&k| k >= n) {
                    return Err(Error::IndexOutOfRange { index: k, limit: n });
                }
                Ok(())
            }
            CoordinateMap::Formaldimine if n != 15 => {
                Err(Error::DimensionMismatch(format!("formaldimine needs 15 Cartesian coordinates, source has {n}")))
            }
            CoordinateMap::Formaldimine => Ok(()),
        }
    }

    pub fn to_source(&self, q: &[f64]) -> Result<Vec<f64>> {
        if q.len() != self.dim() {
            return Err(Error::DimensionMismatch(format!("{} coordinates for a {}-dimensional map", q.len(), self.dim())));
        }
        Ok(match self {
            CoordinateMap::Subset { base, free } => {
                let mut x = base.clone();
                for (&k, &v) in free.iter().zip(q) {
                    x[k] = v;
                }
                x
            }
            CoordinateMap::Formaldimine => build_formaldimine(q[0], q[1]).flat(),
        })
    }

    /// `∂x/∂q`, `n_source × dim`.
    pub fn jacobian(&self, q: &[f64]) -> DMatrix<f64> {
        match self {
            CoordinateMap::Subset { base, free } => {
                let mut j = DMatrix::zeros(base.len(), free.len());
                for (c, &k) in free.iter().enumerate() {
                    j[(k, c)] = 1.0;
                }
                j
            }
            CoordinateMap::Formaldimine => internal_jacobian(q[0], q[1]),
        }
    }

    /// `Jᵀ·v`
    pub fn pull_back(&self, q: &[f64], v: &[f64]) -> Vec<f64> {
        (self.jacobian(q).transpose() * DVector::from_column_slice(v)).iter().copied().collect()
    }
}

/// Derivative data at one point, in map coordinates.
#[derive(Clone, Debug, Serialize)]
pub struct PointDerivatives {
    pub grad0: Vec<f64>,
    pub grad1: Vec<f64>,
    /// `(E1 − E0)·D^CI`; available at degeneracy.
    pub h: Vec<f64>,
    /// `None` when the gap is below the degeneracy threshold.
    pub nac: Option<Vec<f64>>,
}

/// A converged SA-OO-VQE point on the surface.
#[derive(Clone, Debug, Serialize)]
pub struct SurfacePoint {
    pub q: Vec<f64>,
    pub x: Vec<f64>,
    pub e0: f64,
    pub e1: f64,
    pub e_sa: f64,
    pub phi: f64,
    pub derivatives: Option<PointDerivatives>,
    #[serde(skip)]
    pub ints: IntegralSet,
    #[serde(skip)]
    pub derivs: DerivativeIntegralSet,
    #[serde(skip)]
    pub result: SaOoVqeResult,
}

impl SurfacePoint {
    pub fn gap(&self) -> f64 {
        self.e1 - self.e0
    }

    pub fn warm(&self) -> WarmStart {
        WarmStart { theta: self.result.theta.clone(), c: self.result.c.clone() }
    }

    /// `dE1/dq − dE0/dq`.
    pub fn gap_gradient(&self) -> Option<Vec<f64>> {
        self.derivatives.as_ref().map(|d| d.grad1.iter().zip(&d.grad0).map(|(a, b)| a - b).collect())
    }
}

/// SA-OO-VQE over a coordinate space, warm-starting each point from the
/// previous converged one.
pub struct Surface<'a> {
    pub source: &'a dyn IntegralSource,
    pub map: CoordinateMap,
    pub opts: SaOoVqeOptions,
    pub warm: Option<WarmStart>,
}

impl<'a> Surface<'a> {
    pub fn new(source: &'a dyn IntegralSource, map: CoordinateMap, opts: SaOoVqeOptions) -> Result<Self> {
        map.check(source)?;
        Ok(Surface { source, map, opts, warm: None })
    }

    pub fn labels(&self) -> Vec<String> {
        self.map.labels(self.source)
    }

    /// Converge at `q`. The warm start moves to this point on success.
    pub fn energies(&mut self, q: &[f64]) -> Result<SurfacePoint> {
        let x = self.map.to_source(q)?;
        let (ints, derivs) = self.source.load(&x)?;
        derivs.check_coordinates(x.len())?;
        let result = run_sa_oo_vqe(&ints, &self.opts, self.warm.as_ref())?;
        if !result.converged {
            return Err(Error::Convergence(format!(
                "SA-OO-VQE at {q:?}: orbital gradient {:.2e}, circuit gradient {:.2e}",
                result.orbital_grad_max, result.circuit_grad_max
            )));
        }
        self.warm = Some(WarmStart { theta: result.theta.clone(), c: result.c.clone() });
        Ok(SurfacePoint {
            q: q.to_vec(),
            x,
            e0: result.e0,
            e1: result.e1,
            e_sa: result.e_sa,
            phi: result.phi,
            derivatives: None,
            ints,
            derivs,
            result,
        })
    }

    /// Fill in gradients and the coupling at an already converged point.
    pub fn differentiate(&self, p: &mut SurfacePoint) -> Result<()> {
        if p.derivatives.is_some() {
            return Ok(());
        }
        let ctx = ResponseContext::new(&p.ints, &p.result, &self.opts)?;
        let dhs = derivative_hamiltonians(&p.ints, &p.result.c, &p.derivs)?;
        let g0 = ctx.gradient(0, &dhs)?.values;
        let g1 = ctx.gradient(1, &dhs)?.values;
        let (h, _, gap) = ctx.nac_numerator(0, 1, &dhs)?;
        let nac = if gap.abs() < DEGENERATE_GAP {
            None
        } else {
            let csf = ctx.csf_term(0, 1, &dhs)?;
            Some(h.iter().zip(&csf).map(|(a, b)| a / gap + b).collect::<Vec<f64>>())
        };
        let pb = |v: &[f64]| self.map.pull_back(&p.q, v);
        p.derivatives = Some(PointDerivatives { grad0: pb(&g0), grad1: pb(&g1), h: pb(&h), nac: nac.map(|v| pb(&v)) });
        Ok(())
    }

    pub fn evaluate(&mut self, q: &[f64]) -> Result<SurfacePoint> {
        let mut p = self.energies(q)?;
        self.differentiate(&mut p)?;
        Ok(p)
    }
}
