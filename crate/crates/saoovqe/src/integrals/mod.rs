//! Integral containers, AO→MO transforms, frozen-core folding, the
//! FCIDUMP/DERIVDUMP text formats and built-in model systems.

mod derivdump;
mod fcidump;
mod files;
mod model;
mod poly;

pub use derivdump::{parse_derivdump, read_derivdump, write_derivdump};
pub use fcidump::{parse_fcidump, read_fcidump, read_matrix, write_fcidump, write_matrix, Fcidump};
pub use files::{geometry_key, FileSource, GeometryIndex};
pub use model::{crossing3_constants, model_names, model_system, Crossing3Constants, ModelInfo, ModelSystem};

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::fermion::ActiveHamiltonian;
use crate::linalg::{orthonormality_error, sym_gen_eigen, Tensor4};

/// Frozen (doubly occupied), active and virtual MO index lists.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Partition {
    pub frozen: Vec<usize>,
    pub active: Vec<usize>,
    pub virtuals: Vec<usize>,
}

impl Partition {
    /// Lowest `n_frozen` orbitals frozen, next `n_active` active, rest virtual.
    pub fn contiguous(n_mo: usize, n_frozen: usize, n_active: usize) -> Result<Self> {
        if n_frozen + n_active > n_mo {
            return Err(Error::InvalidActiveSpace(format!(
                "{n_frozen} frozen + {n_active} active orbitals exceed {n_mo} MOs"
            )));
        }
        Ok(Partition {
            frozen: (0..n_frozen).collect(),
            active: (n_frozen..n_frozen + n_active).collect(),
            virtuals: (n_frozen + n_active..n_mo).collect(),
        })
    }

    pub fn n_mo(&self) -> usize {
        self.frozen.len() + self.active.len() + self.virtuals.len()
    }

    /// Disjoint and covering 0..n_mo.
    pub fn validate(&self, n_mo: usize) -> Result<()> {
        let mut seen = vec![false; n_mo];
        for &i in self.frozen.iter().chain(&self.active).chain(&self.virtuals) {
            if i >= n_mo || seen[i] {
                return Err(Error::InvalidActiveSpace(format!(
                    "orbital {i} repeated or out of range in partition"
                )));
            }
            seen[i] = true;
        }
        if seen.iter().any(|s| !s) {
            return Err(Error::InvalidActiveSpace("partition does not cover all MOs".into()));
        }
        Ok(())
    }

    /// 0 frozen, 1 active, 2 virtual.
    pub fn class_of(&self, p: usize) -> usize {
        if self.frozen.contains(&p) {
            0
        } else if self.active.contains(&p) {
            1
        } else {
            2
        }
    }
}

/// AO integrals, MO coefficients and the orbital partition of one geometry.
#[derive(Clone, Debug)]
pub struct IntegralSet {
    pub s_ao: DMatrix<f64>,
    pub h_ao: DMatrix<f64>,
    pub g_ao: Tensor4,
    /// AO × MO.
    pub c: DMatrix<f64>,
    pub e_nuc: f64,
    pub partition: Partition,
    pub n_elec: usize,
}

impl IntegralSet {
    pub fn n_ao(&self) -> usize {
        self.s_ao.nrows()
    }

    pub fn n_mo(&self) -> usize {
        self.c.ncols()
    }

    pub fn n_elec_active(&self) -> usize {
        self.n_elec - 2 * self.partition.frozen.len()
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.n_ao();
        if self.h_ao.shape() != (n, n) || self.g_ao.dim() != n || self.c.nrows() != n {
            return Err(Error::DimensionMismatch(format!(
                "S {n}x{n}, h {:?}, g extent {}, C {:?}",
                self.h_ao.shape(),
                self.g_ao.dim(),
                self.c.shape()
            )));
        }
        self.partition.validate(self.n_mo())?;
        if 2 * self.partition.frozen.len() > self.n_elec {
            return Err(Error::InvalidActiveSpace("more frozen orbitals than electron pairs".into()));
        }
        let err = orthonormality_error(&self.c, &self.s_ao);
        if err > 1e-10 {
            return Err(Error::InvalidParameter(format!("MOs not orthonormal (error {err:.2e})")));
        }
        Ok(())
    }

    /// Orbitals from the core-Hamiltonian generalized eigenproblem, each
    /// column signed so its largest component is positive.
    pub fn core_guess(s_ao: &DMatrix<f64>, h_ao: &DMatrix<f64>) -> Result<DMatrix<f64>> {
        let (_, mut c) = sym_gen_eigen(h_ao, s_ao)?;
        fix_signs(&mut c);
        Ok(c)
    }
}

/// Flip each column so its largest-magnitude entry is positive.
pub fn fix_signs(c: &mut DMatrix<f64>) {
    for mut col in c.column_iter_mut() {
        let mut best = 0.0f64;
        for &x in col.iter() {
            if x.abs() > best.abs() + 1e-12 {
                best = x;
            }
        }
        if best < 0.0 {
            col.neg_mut();
        }
    }
}

/// Nuclear derivatives of the AO quantities for one coordinate.
#[derive(Clone, Debug, PartialEq)]
pub struct CoordinateDerivative {
    /// (∂_x μ|ν); S^(x) = T + Tᵀ.
    pub t_half: DMatrix<f64>,
    pub h_x: DMatrix<f64>,
    pub g_x: Tensor4,
    pub de_nuc: f64,
}

impl CoordinateDerivative {
    pub fn zeros(n_ao: usize) -> Self {
        CoordinateDerivative {
            t_half: DMatrix::zeros(n_ao, n_ao),
            h_x: DMatrix::zeros(n_ao, n_ao),
            g_x: Tensor4::zeros(n_ao),
            de_nuc: 0.0,
        }
    }

    pub fn s_x(&self) -> DMatrix<f64> {
        &self.t_half + self.t_half.transpose()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DerivativeIntegralSet {
    pub n_ao: usize,
    pub labels: Vec<String>,
    pub coords: Vec<CoordinateDerivative>,
}

impl DerivativeIntegralSet {
    pub fn n_coords(&self) -> usize {
        self.coords.len()
    }

    pub fn check_coordinates(&self, expected: usize) -> Result<()> {
        if self.coords.len() != expected {
            return Err(Error::Format(format!(
                "derivative file has {} coordinates, geometry has {expected}",
                self.coords.len()
            )));
        }
        Ok(())
    }
}

/// MO-basis integrals.
#[derive(Clone, Debug)]
pub struct MoIntegrals {
    pub h: DMatrix<f64>,
    pub g: Tensor4,
    pub s: DMatrix<f64>,
}

pub fn ao_to_mo(ints: &IntegralSet) -> Result<MoIntegrals> {
    let n = ints.n_ao();
    if ints.h_ao.shape() != (n, n) || ints.g_ao.dim() != n || ints.c.nrows() != n {
        return Err(Error::DimensionMismatch("AO integrals and C disagree".into()));
    }
    let c = &ints.c;
    Ok(MoIntegrals {
        h: c.transpose() * &ints.h_ao * c,
        g: ints.g_ao.transform_rect(c),
        s: c.transpose() * &ints.s_ao * c,
    })
}

/// F^frozen_pq = h_pq + Σ_i (2(pq|ii) − (pi|iq)) over frozen i.
pub fn frozen_fock(h: &DMatrix<f64>, g: &Tensor4, frozen: &[usize]) -> DMatrix<f64> {
    let n = h.nrows();
    DMatrix::from_fn(n, n, |p, q| {
        h[(p, q)] + frozen.iter().map(|&i| 2.0 * g[[p, q, i, i]] - g[[p, i, i, q]]).sum::<f64>()
    })
}

/// Fold doubly occupied frozen orbitals into an active-space Hamiltonian.
pub fn fold_frozen_core(
    h_mo: &DMatrix<f64>,
    g_mo: &Tensor4,
    e_nuc: f64,
    partition: &Partition,
    n_elec_active: usize,
) -> Result<ActiveHamiltonian> {
    let n = h_mo.nrows();
    if g_mo.dim() != n {
        return Err(Error::DimensionMismatch("h and g extents differ".into()));
    }
    partition.validate(n)?;
    if n_elec_active % 2 == 1 {
        return Err(Error::InvalidActiveSpace(format!(
            "{n_elec_active} active electrons: closed-shell reference needs an even count"
        )));
    }
    if n_elec_active > 2 * partition.active.len() {
        return Err(Error::InvalidActiveSpace(format!(
            "{n_elec_active} electrons exceed {} active orbitals",
            partition.active.len()
        )));
    }
    let f = frozen_fock(h_mo, g_mo, &partition.frozen);
    let e_core = e_nuc + partition.frozen.iter().map(|&i| h_mo[(i, i)] + f[(i, i)]).sum::<f64>();
    let act = &partition.active;
    let m = act.len();
    let h_eff = DMatrix::from_fn(m, m, |a, b| f[(act[a], act[b])]);
    ActiveHamiltonian::new(h_eff, g_mo.slice(act), e_core, n_elec_active)
}

/// Average a matrix with its transpose.
pub fn symmetrize(m: &DMatrix<f64>) -> DMatrix<f64> {
    (m + m.transpose()) * 0.5
}

/// Replace each 8-fold orbit by its mean, so the result is exactly symmetric.
pub fn symmetrize8(g: &Tensor4) -> Tensor4 {
    let n = g.dim();
    let mut out = Tensor4::zeros(n);
    for p in 0..n {
        for q in 0..=p {
            for r in 0..n {
                for s in 0..=r {
                    if p * (p + 1) / 2 + q < r * (r + 1) / 2 + s {
                        continue;
                    }
                    let v = (g[[p, q, r, s]]
                        + g[[q, p, r, s]]
                        + g[[p, q, s, r]]
                        + g[[q, p, s, r]]
                        + g[[r, s, p, q]]
                        + g[[s, r, p, q]]
                        + g[[r, s, q, p]]
                        + g[[s, r, q, p]])
                        / 8.0;
                    out.set_sym8(p, q, r, s, v);
                }
            }
        }
    }
    out
}
