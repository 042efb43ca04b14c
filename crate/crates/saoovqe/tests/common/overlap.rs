//! Many-electron overlaps between determinant expansions in two different
//! orbital sets, for finite-difference couplings.

use nalgebra::{DMatrix, DVector};

use super::ci::DetCi;

fn occupied(ci: &DetCi, det: &[bool], frozen: &[usize], active: &[usize], spin: usize) -> Vec<usize> {
    let mut v: Vec<usize> = frozen.to_vec();
    v.extend((0..ci.n).filter(|&p| det[spin * ci.n + p]).map(|p| active[p]));
    v.sort_unstable();
    v
}

fn sub_det(s: &DMatrix<f64>, rows: &[usize], cols: &[usize]) -> f64 {
    let m = DMatrix::from_fn(rows.len(), cols.len(), |i, j| s[(rows[i], cols[j])]);
    m.determinant()
}

/// `⟨A|B⟩` for determinant vectors `a` (orbitals of the bra) and `b`
/// (orbitals of the ket) with MO overlap `s_mo = ⟨φ_p|φ'_q⟩`. Frozen
/// orbitals are doubly occupied in both.
pub fn state_overlap(ci: &DetCi, s_mo: &DMatrix<f64>, frozen: &[usize], active: &[usize], a: &DVector<f64>, b: &DVector<f64>) -> f64 {
    let mut total = 0.0;
    for (i, di) in ci.dets.iter().enumerate() {
        if a[i] == 0.0 {
            continue;
        }
        let (ia, ib) = (occupied(ci, di, frozen, active, 0), occupied(ci, di, frozen, active, 1));
        for (j, dj) in ci.dets.iter().enumerate() {
            if b[j] == 0.0 {
                continue;
            }
            let (ja, jb) = (occupied(ci, dj, frozen, active, 0), occupied(ci, dj, frozen, active, 1));
            total += a[i] * b[j] * sub_det(s_mo, &ia, &ja) * sub_det(s_mo, &ib, &jb);
        }
    }
    total
}
