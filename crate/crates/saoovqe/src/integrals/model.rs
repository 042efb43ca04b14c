//! Built-in analytic model systems.
//!
//! Each model lives in an orthonormal underlying basis `u` with integrals
//! `h_u(x)`, `g_u(x)` that are low-order polynomials in the coordinates. The
//! AO functions are `χ_μ = Σ_k u_k B_kμ(x)`, so `S = BᵀB` and the half
//! derivative overlap is `(∂B)ᵀB`. A mirror parity splits the orbitals into
//! even and odd ones; every even-odd coupling is odd in `x2`.
//!
//! `crossing3`: 3 orbitals, 4 electrons. The odd sector is shifted by
//! `c(x) = Δ0 + s·x1 + b·x3` through `Π_odd = n_2 − e_2222`, which places an
//! exact S0/S1 intersection at the origin and a straight seam
//! `x2 = 0, x1 = −b·x3/s`.
//!
//! `crossing5`: the same active block wrapped by one frozen and one virtual
//! orbital with nontrivial couplings, for orbital-response tests.

use std::sync::OnceLock;

use nalgebra::DMatrix;

use super::poly::Poly;
use super::{symmetrize, symmetrize8, CoordinateDerivative, DerivativeIntegralSet, IntegralSet, Partition};
use crate::error::{Error, Result};
use crate::fermion::{exact_spin_oracle, ActiveHamiltonian, ExcitationMaps};
use crate::linalg::Tensor4;

/// Static description of a model.
#[derive(Clone, Debug, PartialEq)]
pub struct ModelInfo {
    pub name: &'static str,
    pub n_orb: usize,
    pub n_elec: usize,
    pub labels: Vec<String>,
    /// Inclusive bounds per coordinate.
    pub domain: Vec<(f64, f64)>,
    pub n_frozen: usize,
    pub n_active: usize,
}

/// A model with its polynomial integral tables.
#[derive(Clone, Debug)]
pub struct ModelSystem {
    pub info: ModelInfo,
    h: Vec<(usize, usize, Poly)>,
    g: Vec<([usize; 4], Poly)>,
    /// Added to the identity.
    b: Vec<(usize, usize, Poly)>,
    e_nuc: Poly,
}

pub fn model_names() -> &'static [&'static str] {
    &["crossing3", "crossing5"]
}

/// Integrals and their analytic derivatives for model `name` at `x`.
pub fn model_system(name: &str, x: &[f64]) -> Result<(IntegralSet, DerivativeIntegralSet)> {
    let m = ModelSystem::get(name)?;
    Ok((m.integrals(x)?, m.derivatives(x)?))
}

/// Constants of `crossing3`, derived from its fixed Hamiltonian.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Crossing3Constants {
    /// Lowest even singlet minus lowest odd singlet of the unshifted model.
    pub delta0: f64,
    /// Slope of the odd shift along x1; twice the even-odd coupling per unit x2.
    pub s: f64,
    /// Slope of the odd shift along x3.
    pub b: f64,
    pub e0: f64,
    pub k: [f64; 3],
    /// Nuclear-repulsion minimum along x1 and x3.
    pub a1: f64,
    pub a3: f64,
}

impl Crossing3Constants {
    /// Closed-form minimum-energy point on the seam.
    pub fn meci(&self) -> [f64; 3] {
        let r = self.b / self.s;
        let x3 = (self.k[2] * self.a3 - self.k[0] * self.a1 * r) / (self.k[0] * r * r + self.k[2]);
        [-r * x3, 0.0, x3]
    }

    /// S0 minimum (even state below the odd one there).
    pub fn s0_minimum(&self) -> [f64; 3] {
        [self.a1, 0.0, self.a3]
    }
}

const H0_DIAG: [f64; 3] = [-1.2, -0.6, -0.35];
const H0_01: f64 = -0.1;
const G0: [([usize; 4], f64); 13] = [
    ([0, 0, 0, 0], 0.70),
    ([1, 1, 1, 1], 0.60),
    ([2, 2, 2, 2], 0.55),
    ([0, 0, 1, 1], 0.45),
    ([0, 0, 2, 2], 0.40),
    ([1, 1, 2, 2], 0.42),
    ([0, 1, 0, 1], 0.10),
    ([0, 2, 0, 2], 0.08),
    ([1, 2, 1, 2], 0.12),
    ([0, 0, 0, 1], 0.05),
    ([0, 1, 1, 1], 0.03),
    ([0, 1, 2, 2], 0.02),
    ([0, 2, 1, 2], 0.04),
];
/// Even-odd one-body coupling per unit x2: (u0,u2) and (u1,u2).
const V_ODD: [(usize, usize, f64); 2] = [(0, 2, 0.06), (1, 2, 0.08)];

fn tensor_from(n: usize, entries: &[([usize; 4], f64)]) -> Tensor4 {
    let mut g = Tensor4::zeros(n);
    for &([p, q, r, s], v) in entries {
        let old = g[[p, q, r, s]];
        g.set_sym8(p, q, r, s, old + v);
    }
    g
}

pub fn crossing3_constants() -> Crossing3Constants {
    static C: OnceLock<Crossing3Constants> = OnceLock::new();
    *C.get_or_init(|| {
        let mut h = DMatrix::from_diagonal(&nalgebra::DVector::from_row_slice(&H0_DIAG));
        h[(0, 1)] = H0_01;
        h[(1, 0)] = H0_01;
        let ham = ActiveHamiltonian::new(h, tensor_from(3, &G0), 0.0, 4).expect("fixed model");
        let states = exact_spin_oracle(&ham, 6, 0.0).expect("six singlets");
        let maps = ExcitationMaps::new(3);
        let parity = |a: &[num_complex::Complex64]| {
            let g1 = maps.one_rdm(a, a);
            let g2 = maps.two_rdm(a, a);
            g1[(2, 2)] - g2[[2, 2, 2, 2]]
        };
        let even = states.iter().find(|(_, v)| parity(v.amplitudes()) < 0.5).expect("even singlet");
        let odd = states.iter().find(|(_, v)| parity(v.amplitudes()) > 0.5).expect("odd singlet");
        let t = maps.one_rdm(even.1.amplitudes(), odd.1.amplitudes());
        let v: f64 = V_ODD.iter().map(|&(p, q, c)| c * (t[(p, q)] + t[(q, p)])).sum();
        Crossing3Constants {
            delta0: even.0 - odd.0,
            s: 2.0 * v.abs(),
            b: 0.05,
            e0: 1.5,
            k: [0.08, 0.3, 0.06],
            a1: 0.5,
            a3: 0.4,
        }
    })
}

fn nuclear(e0: f64, k: [f64; 3], a1: f64, a3: f64) -> Poly {
    // e0 + ½k1(x1−a1)² + ½k2 x2² + ½k3(x3−a3)²
    Poly::lin(
        e0 + 0.5 * k[0] * a1 * a1 + 0.5 * k[2] * a3 * a3,
        &[(0, -k[0] * a1), (2, -k[2] * a3)],
    )
    .with_quad(0, 0, 0.5 * k[0])
    .with_quad(1, 1, 0.5 * k[1])
    .with_quad(2, 2, 0.5 * k[2])
}

/// Active block shared by both models, placed at orbital offset `o`.
/// `shift` is the coefficient of `Π_odd`.
fn active_block(o: usize, shift: Poly) -> (Vec<(usize, usize, Poly)>, Vec<([usize; 4], Poly)>) {
    let mut h = vec![(o, o + 1, Poly::c(H0_01))];
    for (k, &d) in H0_DIAG.iter().enumerate() {
        h.push((o + k, o + k, Poly::c(d)));
    }
    for &(p, q, c) in &V_ODD {
        h.push((o + p, o + q, Poly::lin(0.0, &[(1, c)])));
    }
    let odd = o + 2;
    h.push((odd, odd, shift.clone()));
    let mut g: Vec<([usize; 4], Poly)> =
        G0.iter().map(|&(i, v)| (i.map(|p| p + o), Poly::c(v))).collect();
    g.push(([odd; 4], shift.scaled(-2.0)));
    (h, g)
}

fn domain3() -> Vec<(f64, f64)> {
    vec![(-1.5, 1.5), (-1.0, 1.0), (-1.0, 1.0)]
}

fn labels3() -> Vec<String> {
    ["x1", "x2", "x3"].iter().map(|s| s.to_string()).collect()
}

impl ModelSystem {
    pub fn get(name: &str) -> Result<ModelSystem> {
        match name {
            "crossing3" => Ok(Self::crossing3()),
            "crossing5" => Ok(Self::crossing5()),
            _ => Err(Error::UnknownModel(format!("{name} (known: {})", model_names().join(", ")))),
        }
    }

    fn crossing3() -> ModelSystem {
        let k = crossing3_constants();
        let (h, g) = active_block(0, Poly::lin(k.delta0, &[(0, k.s), (2, k.b)]));
        let b = vec![
            (0, 0, Poly::lin(0.0, &[(0, 0.10)]).with_quad(0, 0, 0.02)),
            (0, 1, Poly::lin(0.05, &[(2, 0.04)])),
            (0, 2, Poly::lin(0.0, &[(1, 0.12)])),
            (1, 0, Poly::lin(0.02, &[(0, 0.03)])),
            (1, 1, Poly::lin(0.0, &[(2, 0.08)])),
            (1, 2, Poly::lin(0.0, &[(1, 0.07)])),
            (2, 0, Poly::lin(0.0, &[(1, 0.09)])),
            (2, 1, Poly::lin(0.0, &[(1, 0.06)])),
            (2, 2, Poly::lin(0.0, &[(0, 0.05), (2, -0.04)])),
        ];
        ModelSystem {
            info: ModelInfo {
                name: "crossing3",
                n_orb: 3,
                n_elec: 4,
                labels: labels3(),
                domain: domain3(),
                n_frozen: 0,
                n_active: 3,
            },
            h,
            g,
            b,
            e_nuc: nuclear(k.e0, k.k, k.a1, k.a3),
        }
    }

    fn crossing5() -> ModelSystem {
        // orbitals: 0 core, 1..=3 active (3 odd), 4 virtual
        let (mut h, mut g) = active_block(1, Poly::lin(-0.14, &[(0, 0.11), (2, 0.05)]));
        h.extend([
            (0, 0, Poly::c(-3.0)),
            (4, 4, Poly::c(1.0)),
            (0, 1, Poly::lin(0.06, &[(2, 0.02)])),
            (2, 4, Poly::lin(0.07, &[(0, 0.03)])),
            (1, 4, Poly::c(0.04)),
            (0, 3, Poly::lin(0.0, &[(1, 0.03)])),
            (3, 4, Poly::lin(0.0, &[(1, 0.05)])),
        ]);
        let mut extra = vec![
            ([0, 0, 0, 0], 0.9),
            ([4, 4, 4, 4], 0.5),
            ([0, 0, 4, 4], 0.35),
            ([0, 4, 0, 4], 0.02),
            ([0, 1, 2, 2], 0.02),
            ([2, 4, 2, 2], 0.03),
            ([1, 4, 1, 1], 0.02),
        ];
        for u in 1..=3 {
            extra.push(([0, 0, u, u], 0.45));
            extra.push(([0, u, 0, u], 0.03));
            extra.push(([u, u, 4, 4], 0.3));
            extra.push(([u, 4, u, 4], 0.03));
        }
        g.extend(extra.into_iter().map(|(i, v)| (i, Poly::c(v))));
        g.push(([1, 3, 1, 1], Poly::lin(0.0, &[(1, 0.01)])));
        let b = vec![
            (0, 0, Poly::lin(0.0, &[(0, 0.04)])),
            (0, 1, Poly::lin(0.03, &[(2, 0.02)])),
            (1, 0, Poly::lin(0.0, &[(0, 0.02)])),
            (0, 3, Poly::lin(0.0, &[(1, 0.06)])),
            (1, 1, Poly::lin(0.0, &[(0, 0.10)]).with_quad(0, 0, 0.02)),
            (1, 2, Poly::lin(0.05, &[(2, 0.04)])),
            (1, 3, Poly::lin(0.0, &[(1, 0.12)])),
            (2, 1, Poly::lin(0.02, &[(0, 0.03)])),
            (2, 2, Poly::lin(0.0, &[(2, 0.08)])),
            (2, 3, Poly::lin(0.0, &[(1, 0.07)])),
            (3, 1, Poly::lin(0.0, &[(1, 0.09)])),
            (3, 2, Poly::lin(0.0, &[(1, 0.06)])),
            (3, 3, Poly::lin(0.0, &[(0, 0.05), (2, -0.04)])),
            (2, 4, Poly::lin(0.03, &[(0, 0.02)])),
            (4, 2, Poly::lin(0.0, &[(2, 0.02)])),
            (3, 4, Poly::lin(0.0, &[(1, 0.05)])),
            (4, 3, Poly::lin(0.0, &[(1, 0.04)])),
            (4, 4, Poly::lin(0.0, &[(2, 0.03)])),
        ];
        ModelSystem {
            info: ModelInfo {
                name: "crossing5",
                n_orb: 5,
                n_elec: 6,
                labels: labels3(),
                domain: domain3(),
                n_frozen: 1,
                n_active: 3,
            },
            h,
            g,
            b,
            e_nuc: nuclear(6.0, [0.08, 0.3, 0.06], 0.5, 0.4),
        }
    }

    pub fn n_coords(&self) -> usize {
        self.info.labels.len()
    }

    pub fn check_domain(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.n_coords() {
            return Err(Error::OutsideDomain(format!(
                "{} expects {} coordinates, got {}",
                self.info.name,
                self.n_coords(),
                x.len()
            )));
        }
        for ((v, &(lo, hi)), l) in x.iter().zip(&self.info.domain).zip(&self.info.labels) {
            if !v.is_finite() || *v < lo || *v > hi {
                return Err(Error::OutsideDomain(format!("{l} = {v} not in [{lo}, {hi}]")));
            }
        }
        Ok(())
    }

    fn matrix(&self, entries: &[(usize, usize, Poly)], f: impl Fn(&Poly) -> f64, sym: bool) -> DMatrix<f64> {
        let n = self.info.n_orb;
        let mut m = DMatrix::zeros(n, n);
        for (p, q, poly) in entries {
            let v = f(poly);
            m[(*p, *q)] += v;
            if sym && p != q {
                m[(*q, *p)] += v;
            }
        }
        m
    }

    fn tensor(&self, f: impl Fn(&Poly) -> f64) -> Tensor4 {
        let vals: Vec<([usize; 4], f64)> = self.g.iter().map(|(i, p)| (*i, f(p))).collect();
        tensor_from(self.info.n_orb, &vals)
    }

    /// One-electron integrals in the underlying basis.
    pub fn h_u(&self, x: &[f64]) -> DMatrix<f64> {
        self.matrix(&self.h, |p| p.eval(x), true)
    }

    pub fn h_u_deriv(&self, x: &[f64], k: usize) -> DMatrix<f64> {
        self.matrix(&self.h, |p| p.deriv(x, k), true)
    }

    pub fn g_u(&self, x: &[f64]) -> Tensor4 {
        self.tensor(|p| p.eval(x))
    }

    pub fn g_u_deriv(&self, x: &[f64], k: usize) -> Tensor4 {
        self.tensor(|p| p.deriv(x, k))
    }

    /// AO coefficients in the underlying basis.
    pub fn basis(&self, x: &[f64]) -> DMatrix<f64> {
        let n = self.info.n_orb;
        DMatrix::identity(n, n) + self.matrix(&self.b, |p| p.eval(x), false)
    }

    pub fn basis_deriv(&self, x: &[f64], k: usize) -> DMatrix<f64> {
        self.matrix(&self.b, |p| p.deriv(x, k), false)
    }

    pub fn e_nuc(&self, x: &[f64]) -> f64 {
        self.e_nuc.eval(x)
    }

    pub fn e_nuc_deriv(&self, x: &[f64], k: usize) -> f64 {
        self.e_nuc.deriv(x, k)
    }

    pub fn partition(&self) -> Partition {
        Partition::contiguous(self.info.n_orb, self.info.n_frozen, self.info.n_active).expect("model partition")
    }

    /// AO integrals with core-Hamiltonian orbitals.
    pub fn integrals(&self, x: &[f64]) -> Result<IntegralSet> {
        self.check_domain(x)?;
        let b = self.basis(x);
        let s_ao = symmetrize(&(b.transpose() * &b));
        let h_ao = symmetrize(&(b.transpose() * self.h_u(x) * &b));
        let g_ao = symmetrize8(&self.g_u(x).transform(&b));
        let c = IntegralSet::core_guess(&s_ao, &h_ao)?;
        Ok(IntegralSet {
            s_ao,
            h_ao,
            g_ao,
            c,
            e_nuc: self.e_nuc(x),
            partition: self.partition(),
            n_elec: self.info.n_elec,
        })
    }

    /// Analytic derivatives of the AO quantities, exactly symmetric.
    pub fn derivatives(&self, x: &[f64]) -> Result<DerivativeIntegralSet> {
        self.check_domain(x)?;
        let b = self.basis(x);
        let h = self.h_u(x);
        let g = self.g_u(x);
        let coords = (0..self.n_coords())
            .map(|k| {
                let db = self.basis_deriv(x, k);
                let hx = db.transpose() * &h * &b + b.transpose() * self.h_u_deriv(x, k) * &b + b.transpose() * &h * &db;
                let mut gx = self.g_u_deriv(x, k).transform(&b);
                gx.add_scaled(&g.transform4(&db, &b, &b, &b), 1.0);
                gx.add_scaled(&g.transform4(&b, &db, &b, &b), 1.0);
                gx.add_scaled(&g.transform4(&b, &b, &db, &b), 1.0);
                gx.add_scaled(&g.transform4(&b, &b, &b, &db), 1.0);
                CoordinateDerivative {
                    t_half: db.transpose() * &b,
                    h_x: symmetrize(&hx),
                    g_x: symmetrize8(&gx),
                    de_nuc: self.e_nuc_deriv(x, k),
                }
            })
            .collect();
        Ok(DerivativeIntegralSet { n_ao: self.info.n_orb, labels: self.info.labels.clone(), coords })
    }
}
