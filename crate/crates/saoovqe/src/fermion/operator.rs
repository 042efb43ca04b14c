use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::sim::{Pauli, PauliString, PauliSum};

/// One ladder operator: spin-orbital index and `true` for creation.
pub type Ladder = (usize, bool);

/// Real-coefficient fermionic operator kept in normal order: creators left of
/// annihilators, each group sorted by descending mode index.
#[derive(Clone, Debug, PartialEq)]
pub struct FermionOperator {
    n_modes: usize,
    terms: BTreeMap<Vec<Ladder>, f64>,
}

impl FermionOperator {
    pub fn zero(n_modes: usize) -> Self {
        FermionOperator { n_modes, terms: BTreeMap::new() }
    }

    pub fn identity(n_modes: usize) -> Self {
        let mut op = FermionOperator::zero(n_modes);
        op.terms.insert(Vec::new(), 1.0);
        op
    }

    /// Product `c · ops[0] ops[1] …`, normal ordered.
    pub fn from_product(n_modes: usize, ops: &[Ladder], c: f64) -> Result<Self> {
        for &(m, _) in ops {
            if m >= n_modes {
                return Err(Error::IndexOutOfRange { index: m, limit: n_modes });
            }
        }
        let mut out = FermionOperator::zero(n_modes);
        for (t, k) in normal_order(ops.to_vec(), c) {
            out.add_raw(t, k);
        }
        Ok(out)
    }

    pub fn creation(n_modes: usize, j: usize) -> Result<Self> {
        FermionOperator::from_product(n_modes, &[(j, true)], 1.0)
    }

    pub fn annihilation(n_modes: usize, j: usize) -> Result<Self> {
        FermionOperator::from_product(n_modes, &[(j, false)], 1.0)
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<Ladder>, &f64)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    fn add_raw(&mut self, t: Vec<Ladder>, c: f64) {
        let e = self.terms.entry(t.clone()).or_insert(0.0);
        *e += c;
        if *e == 0.0 {
            self.terms.remove(&t);
        }
    }

    pub fn add(&self, other: &FermionOperator) -> Self {
        assert_eq!(self.n_modes, other.n_modes);
        let mut out = self.clone();
        for (t, c) in &other.terms {
            out.add_raw(t.clone(), *c);
        }
        out
    }

    pub fn scale(&self, a: f64) -> Self {
        let mut out = FermionOperator::zero(self.n_modes);
        for (t, c) in &self.terms {
            out.add_raw(t.clone(), c * a);
        }
        out
    }

    pub fn mul(&self, other: &FermionOperator) -> Self {
        assert_eq!(self.n_modes, other.n_modes);
        let mut out = FermionOperator::zero(self.n_modes);
        for (t1, c1) in &self.terms {
            for (t2, c2) in &other.terms {
                let mut ops = t1.clone();
                ops.extend_from_slice(t2);
                for (t, k) in normal_order(ops, c1 * c2) {
                    out.add_raw(t, k);
                }
            }
        }
        out
    }

    pub fn adjoint(&self) -> Self {
        let mut out = FermionOperator::zero(self.n_modes);
        for (t, c) in &self.terms {
            let ops: Vec<Ladder> = t.iter().rev().map(|&(m, d)| (m, !d)).collect();
            for (tt, k) in normal_order(ops, *c) {
                out.add_raw(tt, k);
            }
        }
        out
    }

    /// Drop coefficients with magnitude ≤ tol.
    pub fn simplify(&mut self, tol: f64) {
        self.terms.retain(|_, c| c.abs() > tol);
    }

    /// Action on an occupation-number basis state, summed over terms.
    pub fn apply_to_basis(&self, b: usize) -> Vec<(usize, f64)> {
        let mut out = Vec::new();
        for (t, c) in &self.terms {
            if let Some((b2, s)) = apply_ladders(t, self.n_modes, b) {
                out.push((b2, c * s));
            }
        }
        out
    }
}

/// Apply `ops[0] ops[1] …` (rightmost first) to basis index `b` of an
/// `n_modes`-qubit register. Mode `j` is bit `n_modes-1-j`; the sign counts
/// occupied modes with smaller index, matching the Jordan-Wigner Z string.
#[inline]
pub fn apply_ladders(ops: &[Ladder], n_modes: usize, mut b: usize) -> Option<(usize, f64)> {
    let mut sign = 1.0;
    for &(m, create) in ops.iter().rev() {
        let bit = 1usize << (n_modes - 1 - m);
        let occ = b & bit != 0;
        if occ == create {
            return None;
        }
        // modes 0..m occupy the bits above `bit`
        let above = b >> (n_modes - m);
        if above.count_ones() % 2 == 1 {
            sign = -sign;
        }
        b ^= bit;
    }
    Some((b, sign))
}

fn normal_order(mut ops: Vec<Ladder>, mut c: f64) -> Vec<(Vec<Ladder>, f64)> {
    let mut out = Vec::new();
    for i in 1..ops.len() {
        for j in (1..=i).rev() {
            let right = ops[j];
            let left = ops[j - 1];
            if right.1 && !left.1 {
                ops[j - 1] = right;
                ops[j] = left;
                c = -c;
                if right.0 == left.0 {
                    let mut reduced = ops[..j - 1].to_vec();
                    reduced.extend_from_slice(&ops[j + 1..]);
                    out.extend(normal_order(reduced, -c));
                }
            } else if right.1 == left.1 {
                if right.0 == left.0 {
                    return out;
                }
                if right.0 > left.0 {
                    ops[j - 1] = right;
                    ops[j] = left;
                    c = -c;
                }
            }
        }
    }
    out.push((ops, c));
    out
}

/// Σ_σ a†_{pσ} a_{qσ} over `n_active` spatial orbitals (interleaved spins).
pub fn spin_free_excitation(n_active: usize, p: usize, q: usize) -> Result<FermionOperator> {
    check_spatial(n_active, &[p, q])?;
    let n = 2 * n_active;
    let mut op = FermionOperator::zero(n);
    for s in 0..2 {
        op = op.add(&FermionOperator::from_product(n, &[(2 * p + s, true), (2 * q + s, false)], 1.0)?);
    }
    Ok(op)
}

/// Σ_{στ} a†_{pσ} a†_{rτ} a_{sτ} a_{qσ}.
pub fn spin_free_pair_excitation(n_active: usize, p: usize, q: usize, r: usize, s: usize) -> Result<FermionOperator> {
    check_spatial(n_active, &[p, q, r, s])?;
    let n = 2 * n_active;
    let mut op = FermionOperator::zero(n);
    for a in 0..2 {
        for b in 0..2 {
            let ops = [(2 * p + a, true), (2 * r + b, true), (2 * s + b, false), (2 * q + a, false)];
            op = op.add(&FermionOperator::from_product(n, &ops, 1.0)?);
        }
    }
    Ok(op)
}

fn check_spatial(n_active: usize, idx: &[usize]) -> Result<()> {
    for &i in idx {
        if i >= n_active {
            return Err(Error::IndexOutOfRange { index: i, limit: n_active });
        }
    }
    Ok(())
}

/// Total number operator.
pub fn number_operator(n_modes: usize) -> FermionOperator {
    let mut op = FermionOperator::zero(n_modes);
    for j in 0..n_modes {
        op.add_raw(vec![(j, true), (j, false)], 1.0);
    }
    op
}

/// S_z = ½ Σ_p (n_{p↑} − n_{p↓}).
pub fn s_z(n_active: usize) -> FermionOperator {
    let mut op = FermionOperator::zero(2 * n_active);
    for p in 0..n_active {
        op.add_raw(vec![(2 * p, true), (2 * p, false)], 0.5);
        op.add_raw(vec![(2 * p + 1, true), (2 * p + 1, false)], -0.5);
    }
    op
}

/// S² = S₋S₊ + S_z + S_z².
pub fn s_squared(n_active: usize) -> FermionOperator {
    let n = 2 * n_active;
    let mut splus = FermionOperator::zero(n);
    for p in 0..n_active {
        splus.add_raw(vec![(2 * p, true), (2 * p + 1, false)], 1.0);
    }
    let sminus = splus.adjoint();
    let sz = s_z(n_active);
    sminus.mul(&splus).add(&sz).add(&sz.mul(&sz))
}

fn ladder_image(n_qubits: usize, j: usize, create: bool) -> PauliSum {
    let mut x = PauliString::identity(n_qubits);
    for k in 0..j {
        x.set(k, Pauli::Z);
    }
    let mut y = x;
    x.set(j, Pauli::X);
    y.set(j, Pauli::Y);
    let sy = if create { -0.5 } else { 0.5 };
    PauliSum::from_terms(
        n_qubits,
        [(Complex64::new(0.5, 0.0), x), (Complex64::new(0.0, sy), y)],
    )
}

/// Jordan-Wigner image: a_j = Z_0…Z_{j−1}(X + iY)/2.
pub fn jordan_wigner(op: &FermionOperator) -> PauliSum {
    let n = op.n_modes;
    let cre: Vec<PauliSum> = (0..n).map(|j| ladder_image(n, j, true)).collect();
    let ann: Vec<PauliSum> = (0..n).map(|j| ladder_image(n, j, false)).collect();
    let mut out = PauliSum::zero(n);
    for (t, c) in &op.terms {
        let mut acc = PauliSum::identity(n);
        for &(m, d) in t {
            acc = acc.mul(if d { &cre[m] } else { &ann[m] });
        }
        out = out.add(&acc.scale(Complex64::new(*c, 0.0)));
    }
    out.simplify(1e-15);
    out
}
