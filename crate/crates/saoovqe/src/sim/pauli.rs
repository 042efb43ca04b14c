use std::collections::BTreeMap;
use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

const I1: Complex64 = Complex64::new(1.0, 0.0);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    fn bits(self) -> (bool, bool) {
        match self {
            Pauli::I => (false, false),
            Pauli::X => (true, false),
            Pauli::Y => (true, true),
            Pauli::Z => (false, true),
        }
    }

    fn from_bits(x: bool, z: bool) -> Self {
        match (x, z) {
            (false, false) => Pauli::I,
            (true, false) => Pauli::X,
            (true, true) => Pauli::Y,
            (false, true) => Pauli::Z,
        }
    }

    pub fn letter(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }
}

/// Tensor product of single-qubit Paulis in symplectic form.
///
/// Qubit `q` lives on bit `n_qubits - 1 - q` of both masks, which is also the
/// bit it occupies in a computational-basis index, so `|q0 q1 ... ⟩` reads
/// left to right as a binary number.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PauliString {
    n_qubits: usize,
    x: u64,
    z: u64,
}

impl PauliString {
    pub fn identity(n_qubits: usize) -> Self {
        assert!(n_qubits <= 63, "at most 63 qubits");
        PauliString { n_qubits, x: 0, z: 0 }
    }

    pub fn from_ops(ops: &[Pauli]) -> Self {
        let mut s = PauliString::identity(ops.len());
        for (q, &p) in ops.iter().enumerate() {
            s.set(q, p);
        }
        s
    }

    /// Parse a string such as `"XIZY"` (qubit 0 first).
    pub fn parse(text: &str) -> Result<Self> {
        let ops = text
            .chars()
            .map(|c| match c {
                'I' => Ok(Pauli::I),
                'X' => Ok(Pauli::X),
                'Y' => Ok(Pauli::Y),
                'Z' => Ok(Pauli::Z),
                other => Err(Error::Format(format!("bad Pauli letter `{other}`"))),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(PauliString::from_ops(&ops))
    }

    /// Single-qubit operator `p` on qubit `q`.
    pub fn single(n_qubits: usize, q: usize, p: Pauli) -> Self {
        let mut s = PauliString::identity(n_qubits);
        s.set(q, p);
        s
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    fn bit(&self, q: usize) -> u64 {
        assert!(q < self.n_qubits, "qubit {q} out of range");
        1u64 << (self.n_qubits - 1 - q)
    }

    pub fn get(&self, q: usize) -> Pauli {
        let b = self.bit(q);
        Pauli::from_bits(self.x & b != 0, self.z & b != 0)
    }

    pub fn set(&mut self, q: usize, p: Pauli) {
        let b = self.bit(q);
        let (x, z) = p.bits();
        self.x = if x { self.x | b } else { self.x & !b };
        self.z = if z { self.z | b } else { self.z & !b };
    }

    pub fn ops(&self) -> Vec<Pauli> {
        (0..self.n_qubits).map(|q| self.get(q)).collect()
    }

    pub fn x_mask(&self) -> u64 {
        self.x
    }

    pub fn z_mask(&self) -> u64 {
        self.z
    }

    pub fn is_identity(&self) -> bool {
        self.x == 0 && self.z == 0
    }

    /// Number of non-identity factors.
    pub fn weight(&self) -> usize {
        (self.x | self.z).count_ones() as usize
    }

    /// Qubits carrying a non-identity factor, ascending.
    pub fn support(&self) -> Vec<usize> {
        (0..self.n_qubits)
            .filter(|&q| self.get(q) != Pauli::I)
            .collect()
    }

    pub fn n_y(&self) -> u32 {
        (self.x & self.z).count_ones()
    }

    /// `self * other = phase * result`.
    pub fn mul(&self, other: &PauliString) -> (Complex64, PauliString) {
        assert_eq!(self.n_qubits, other.n_qubits);
        let x = self.x ^ other.x;
        let z = self.z ^ other.z;
        // P(x,z) = i^{x.z} X^x Z^z; moving Z^{z1} past X^{x2} costs (-1)^{z1.x2}
        let e = (self.x & self.z).count_ones() as i64 + (other.x & other.z).count_ones() as i64
            - (x & z).count_ones() as i64
            + 2 * (self.z & other.x).count_ones() as i64;
        (
            i_pow(e),
            PauliString {
                n_qubits: self.n_qubits,
                x,
                z,
            },
        )
    }

    pub fn commutes_with(&self, other: &PauliString) -> bool {
        ((self.x & other.z).count_ones() + (self.z & other.x).count_ones()) % 2 == 0
    }

    /// `P|b⟩ = phase |b'⟩`.
    #[inline]
    pub fn act(&self, b: usize) -> (usize, Complex64) {
        let b64 = b as u64;
        let mut e = self.n_y() as i64;
        if (b64 & self.z).count_ones() % 2 == 1 {
            e += 2;
        }
        ((b64 ^ self.x) as usize, i_pow(e))
    }

    pub fn dense(&self) -> DMatrix<Complex64> {
        let dim = 1usize << self.n_qubits;
        let mut m = DMatrix::zeros(dim, dim);
        for b in 0..dim {
            let (t, ph) = self.act(b);
            m[(t, b)] += ph;
        }
        m
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for p in self.ops() {
            write!(f, "{}", p.letter())?;
        }
        Ok(())
    }
}

pub(crate) fn i_pow(e: i64) -> Complex64 {
    match e.rem_euclid(4) {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

/// Weighted sum of Pauli strings in canonical combined form.
#[derive(Clone, Debug, PartialEq)]
pub struct PauliSum {
    n_qubits: usize,
    terms: BTreeMap<PauliString, Complex64>,
}

impl PauliSum {
    pub fn zero(n_qubits: usize) -> Self {
        PauliSum {
            n_qubits,
            terms: BTreeMap::new(),
        }
    }

    pub fn identity(n_qubits: usize) -> Self {
        PauliSum::from_term(PauliString::identity(n_qubits), I1)
    }

    pub fn from_term(s: PauliString, c: Complex64) -> Self {
        let mut out = PauliSum::zero(s.n_qubits());
        out.add_term(s, c);
        out
    }

    pub fn from_terms(n_qubits: usize, terms: impl IntoIterator<Item = (Complex64, PauliString)>) -> Self {
        let mut out = PauliSum::zero(n_qubits);
        for (c, s) in terms {
            out.add_term(s, c);
        }
        out
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, s: PauliString, c: Complex64) {
        assert_eq!(s.n_qubits(), self.n_qubits, "qubit count mismatch");
        let entry = self.terms.entry(s).or_insert(Complex64::new(0.0, 0.0));
        *entry += c;
        if entry.norm() == 0.0 {
            self.terms.remove(&s);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&PauliString, &Complex64)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, s: &PauliString) -> Complex64 {
        self.terms.get(s).copied().unwrap_or_default()
    }

    /// Drop terms with |c| <= tol.
    pub fn simplify(&mut self, tol: f64) {
        self.terms.retain(|_, c| c.norm() > tol);
    }

    pub fn scale(&self, a: Complex64) -> Self {
        PauliSum {
            n_qubits: self.n_qubits,
            terms: self
                .terms
                .iter()
                .map(|(s, c)| (*s, c * a))
                .filter(|(_, c)| c.norm() != 0.0)
                .collect(),
        }
    }

    pub fn add(&self, other: &PauliSum) -> Self {
        let mut out = self.clone();
        for (s, c) in &other.terms {
            out.add_term(*s, *c);
        }
        out
    }

    pub fn sub(&self, other: &PauliSum) -> Self {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    pub fn mul(&self, other: &PauliSum) -> Self {
        let mut out = PauliSum::zero(self.n_qubits);
        for (s1, c1) in &self.terms {
            for (s2, c2) in &other.terms {
                let (ph, s) = s1.mul(s2);
                out.add_term(s, c1 * c2 * ph);
            }
        }
        out
    }

    pub fn adjoint(&self) -> Self {
        PauliSum {
            n_qubits: self.n_qubits,
            terms: self.terms.iter().map(|(s, c)| (*s, c.conj())).collect(),
        }
    }

    pub fn commutator(&self, other: &PauliSum) -> Self {
        self.mul(other).sub(&other.mul(self))
    }

    /// Hermitian iff every coefficient is real (Pauli strings are Hermitian).
    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.terms.values().all(|c| c.im.abs() <= tol)
    }

    /// Largest coefficient magnitude, 0 for the empty sum.
    pub fn max_abs(&self) -> f64 {
        self.terms.values().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Sum of |c|, an upper bound on the operator norm.
    pub fn l1_norm(&self) -> f64 {
        self.terms.values().map(|c| c.norm()).sum()
    }

    pub fn strings_commute(&self) -> bool {
        let v: Vec<_> = self.terms.keys().collect();
        v.iter()
            .enumerate()
            .all(|(i, a)| v[i + 1..].iter().all(|b| a.commutes_with(b)))
    }

    pub fn dense(&self) -> DMatrix<Complex64> {
        let dim = 1usize << self.n_qubits;
        let mut m = DMatrix::zeros(dim, dim);
        for (s, c) in &self.terms {
            for b in 0..dim {
                let (t, ph) = s.act(b);
                m[(t, b)] += c * ph;
            }
        }
        m
    }

    /// Compressed column form for repeated application.
    pub fn to_sparse(&self) -> SparseOperator {
        let dim = 1usize << self.n_qubits;
        let mut cols: Vec<Vec<(usize, Complex64)>> = vec![Vec::new(); dim];
        for (s, c) in &self.terms {
            for (b, col) in cols.iter_mut().enumerate() {
                let (t, ph) = s.act(b);
                col.push((t, c * ph));
            }
        }
        SparseOperator::from_columns(self.n_qubits, cols)
    }
}

/// Sparse operator stored by columns: `entries[col]` lists `(row, value)`.
#[derive(Clone, Debug)]
pub struct SparseOperator {
    n_qubits: usize,
    col_start: Vec<usize>,
    rows: Vec<usize>,
    values: Vec<Complex64>,
}

impl SparseOperator {
    pub fn from_columns(n_qubits: usize, cols: Vec<Vec<(usize, Complex64)>>) -> Self {
        let mut col_start = Vec::with_capacity(cols.len() + 1);
        let mut rows = Vec::new();
        let mut values = Vec::new();
        col_start.push(0);
        for mut col in cols {
            col.sort_by_key(|e| e.0);
            let mut merged: Vec<(usize, Complex64)> = Vec::with_capacity(col.len());
            for (r, v) in col {
                match merged.last_mut() {
                    Some(last) if last.0 == r => last.1 += v,
                    _ => merged.push((r, v)),
                }
            }
            for (r, v) in merged {
                if v.norm() > 1e-15 {
                    rows.push(r);
                    values.push(v);
                }
            }
            col_start.push(rows.len());
        }
        SparseOperator {
            n_qubits,
            col_start,
            rows,
            values,
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.col_start.len() - 1
    }

    pub fn nnz(&self) -> usize {
        self.rows.len()
    }

    /// `out = A v`.
    pub fn apply_into(&self, v: &[Complex64], out: &mut [Complex64]) {
        out.iter_mut().for_each(|o| *o = Complex64::new(0.0, 0.0));
        for (c, &vc) in v.iter().enumerate() {
            if vc.re == 0.0 && vc.im == 0.0 {
                continue;
            }
            for k in self.col_start[c]..self.col_start[c + 1] {
                out[self.rows[k]] += self.values[k] * vc;
            }
        }
    }

    pub fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); v.len()];
        self.apply_into(v, &mut out);
        out
    }

    /// `⟨a|A|b⟩`.
    pub fn sandwich(&self, a: &[Complex64], b: &[Complex64]) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (c, &bc) in b.iter().enumerate() {
            if bc.re == 0.0 && bc.im == 0.0 {
                continue;
            }
            for k in self.col_start[c]..self.col_start[c + 1] {
                acc += a[self.rows[k]].conj() * self.values[k] * bc;
            }
        }
        acc
    }

    /// Largest absolute column sum (the induced 1-norm).
    pub fn norm1(&self) -> f64 {
        (0..self.dim())
            .map(|c| {
                (self.col_start[c]..self.col_start[c + 1])
                    .map(|k| self.values[k].norm())
                    .sum::<f64>()
            })
            .fold(0.0, f64::max)
    }
}
