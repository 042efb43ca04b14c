mod common;

use common::ci::DetCi;
use common::ints::{random_eri, random_orthogonal, random_symmetric};
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use saoovqe::integrals::{frozen_fock, Partition};
use saoovqe::linalg::{expm, orthonormality_error, Tensor4};
use saoovqe::orbital::{
    fock_matrices, generalized_fock, newton_step, orbital_gradient, orbital_hessian, rotate_orbitals, PairMask,
};
use saoovqe::savqe::{complete_rdms, RdmSet, RdmTag};

struct Case {
    h: DMatrix<f64>,
    g: Tensor4,
    part: Partition,
    act: RdmSet,
    gamma: DMatrix<f64>,
    big: Tensor4,
}

/// 1 frozen, 3 active (4 electrons), 1 virtual; RDMs are the equal-weight
/// average of two random normalized CI vectors.
fn case(seed: u64) -> Case {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let h = random_symmetric(&mut rng, 5, 1.0);
    let g = random_eri(&mut rng, 5, 0.3);
    let part = Partition::contiguous(5, 1, 3).unwrap();
    let ci = DetCi::new(3, 2, 2);
    let mut parts = Vec::new();
    for k in 0..2 {
        let v = DVector::from_fn(ci.dets.len(), |_, _| rng.gen_range(-1.0..1.0)).normalize();
        parts.push(RdmSet {
            gamma: ci.one_rdm(&v, &v),
            big_gamma: ci.two_rdm(&v, &v),
            overlap: 1.0,
            tag: RdmTag::State(k),
        });
    }
    let act = RdmSet::combine(&[(0.5, &parts[0]), (0.5, &parts[1])], RdmTag::StateAveraged);
    let (gamma, big) = complete_rdms(&act, &part);
    Case { h, g, part, act, gamma, big }
}

fn energy(c: &Case, kappa: &[f64], mask: &PairMask) -> f64 {
    let u = expm(&(-mask.to_matrix(kappa)));
    let h = u.transpose() * &c.h * &u;
    let g = c.g.transform(&u);
    c.gamma.dot(&h) + 0.5 * c.big.dot(&g)
}

#[test]
fn completed_rdms_reproduce_the_folded_energy() {
    let c = case(1);
    let fi = frozen_fock(&c.h, &c.g, &c.part.frozen);
    let e_core = c.h[(0, 0)] + fi[(0, 0)];
    let h_eff = fi.view((1, 1), (3, 3)).into_owned();
    let e_act = c.act.energy(&h_eff, &c.g.slice(&c.part.active), e_core);
    let e_full = c.gamma.dot(&c.h) + 0.5 * c.big.dot(&c.g);
    assert!((e_act - e_full).abs() < 1e-12, "{e_act} vs {e_full}");
}

#[test]
fn ci_rdms_satisfy_state_invariants() {
    let c = case(2);
    assert!(c.act.invariant_error(4) < 1e-12);
}

#[test]
fn partitioned_fock_equals_full_space_build() {
    let c = case(3);
    let full = generalized_fock(&c.gamma, &c.big, &c.h, &c.g);
    let part = fock_matrices(&c.act.gamma, &c.act.big_gamma, 1.0, &c.h, &c.g, &c.part).unwrap();
    assert!((&full - &part.general).amax() < 1e-12);
    // virtual row is empty
    assert!(part.general.row(4).amax() == 0.0);
}

#[test]
fn closed_shell_fock_is_twice_the_canonical_fock() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let h = random_symmetric(&mut rng, 4, 1.0);
    let g = random_eri(&mut rng, 4, 0.3);
    let part = Partition::contiguous(4, 2, 0).unwrap();
    let zero = RdmSet::zeros(0, RdmTag::State(0));
    let f = fock_matrices(&zero.gamma, &zero.big_gamma, 1.0, &h, &g, &part).unwrap();
    let canon = frozen_fock(&h, &g, &[0, 1]);
    for i in 0..2 {
        for q in 0..4 {
            assert!((f.general[(i, q)] - 2.0 * canon[(q, i)]).abs() < 1e-12);
        }
    }
}

#[test]
fn fock_rejects_wrong_rdm_extent() {
    let c = case(5);
    let bad = DMatrix::zeros(2, 2);
    assert!(fock_matrices(&bad, &Tensor4::zeros(2), 1.0, &c.h, &c.g, &c.part).is_err());
}

#[test]
fn symmetric_fock_gives_zero_gradient() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let f = random_symmetric(&mut rng, 5, 1.0);
    let grad = orbital_gradient(&f, &PairMask::all(5));
    assert!(grad.iter().all(|x| x.abs() < 1e-15));
}

#[test]
fn gradient_matches_finite_differences() {
    for seed in [7, 8] {
        let c = case(seed);
        let mask = PairMask::all(5);
        let f = generalized_fock(&c.gamma, &c.big, &c.h, &c.g);
        let grad = orbital_gradient(&f, &mask);
        let step = 1e-5;
        for k in 0..mask.len() {
            let mut kp = vec![0.0; mask.len()];
            kp[k] = step;
            let mut km = kp.clone();
            km[k] = -step;
            let fd = (energy(&c, &kp, &mask) - energy(&c, &km, &mask)) / (2.0 * step);
            assert!((fd - grad[k]).abs() < 1e-8, "pair {:?}: {fd} vs {}", mask.pairs[k], grad[k]);
        }
    }
}

#[test]
fn frozen_frozen_and_virtual_pairs_have_zero_gradient() {
    // 2 frozen, 2 active, 2 virtual
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let h = random_symmetric(&mut rng, 6, 1.0);
    let g = random_eri(&mut rng, 6, 0.3);
    let part = Partition::contiguous(6, 2, 2).unwrap();
    let ci = DetCi::new(2, 1, 1);
    let v = DVector::from_fn(ci.dets.len(), |_, _| rng.gen_range(-1.0..1.0)).normalize();
    let act = RdmSet { gamma: ci.one_rdm(&v, &v), big_gamma: ci.two_rdm(&v, &v), overlap: 1.0, tag: RdmTag::State(0) };
    let (gamma, big) = complete_rdms(&act, &part);
    let f = generalized_fock(&gamma, &big, &h, &g);
    let all = PairMask::all(6);
    let grad = orbital_gradient(&f, &all);
    for (k, &(p, q)) in all.pairs.iter().enumerate() {
        let redundant = (p < 2 && q < 2) || (p >= 4 && q >= 4);
        if redundant {
            assert!(grad[k].abs() < 1e-12, "{p}-{q}: {}", grad[k]);
        }
    }
    let mask = PairMask::new(&part, false);
    assert_eq!(mask.len(), 15 - 1 - 1 - 1);
    assert_eq!(PairMask::new(&part, true).len(), 13);
}

#[test]
fn hessian_matches_mixed_second_differences() {
    let c = case(10);
    let mask = PairMask::all(5);
    let hess = orbital_hessian(&c.gamma, &c.big, &c.h, &c.g, &mask);
    let d = 1e-4;
    let n = mask.len();
    let e = |a: usize, sa: f64, b: usize, sb: f64| {
        let mut k = vec![0.0; n];
        k[a] += sa;
        k[b] += sb;
        energy(&c, &k, &mask)
    };
    let mut worst = 0.0f64;
    for a in 0..n {
        for b in 0..n {
            let fd = (e(a, d, b, d) - e(a, d, b, -d) - e(a, -d, b, d) + e(a, -d, b, -d)) / (4.0 * d * d);
            worst = worst.max((fd - hess[(a, b)]).abs());
        }
    }
    assert!(worst < 1e-5, "worst Hessian error {worst:.3e}");
}

#[test]
fn hessian_is_symmetric() {
    let c = case(11);
    let mask = PairMask::new(&c.part, true);
    let hess = orbital_hessian(&c.gamma, &c.big, &c.h, &c.g, &mask);
    assert!((&hess - hess.transpose()).amax() < 1e-11);
}

#[test]
fn two_orbital_one_electron_hand_case() {
    // one electron in orbital 0, no repulsion: E(κ) = h00 cos²κ + h11 sin²κ − h01 sin 2κ
    let h = DMatrix::from_row_slice(2, 2, &[-1.0, 0.2, 0.2, 0.5]);
    let g = Tensor4::zeros(2);
    let gamma = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 0.0]);
    let big = Tensor4::zeros(2);
    let mask = PairMask::all(2);
    let f = generalized_fock(&gamma, &big, &h, &g);
    let grad = orbital_gradient(&f, &mask);
    // dE/dκ at 0 = −2 h01 with K_10 = κ; C' = C exp(−K) mixes +κ into column 0
    let e = |k: f64| {
        let u = expm(&(-mask.to_matrix(&[k])));
        (u.transpose() * &h * &u)[(0, 0)]
    };
    let fd = (e(1e-6) - e(-1e-6)) / 2e-6;
    assert!((grad[0] - fd).abs() < 1e-8);
    assert!((grad[0] - 2.0 * 0.2).abs() < 1e-12 || (grad[0] + 2.0 * 0.2).abs() < 1e-12);
    let hess = orbital_hessian(&gamma, &big, &h, &g, &mask);
    // second derivative of h00 cos² + h11 sin² ± 2 h01 sin cos = 2(h11 − h00)
    assert!((hess[(0, 0)] - 2.0 * (0.5 + 1.0)).abs() < 1e-12, "{}", hess[(0, 0)]);
}

#[test]
fn newton_step_is_zero_at_zero_gradient() {
    let h = DMatrix::identity(3, 3);
    let s = newton_step(&[0.0; 3], &h, 0.5).unwrap();
    assert_eq!(s.kappa, vec![0.0; 3]);
    assert_eq!(s.shift, 0.0);
}

#[test]
fn newton_step_solves_positive_definite_system() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let a = DMatrix::from_fn(4, 4, |_, _| rng.gen_range(-1.0..1.0));
    let h = &a * a.transpose() + DMatrix::identity(4, 4);
    let g = [0.1, -0.05, 0.02, 0.03];
    let s = newton_step(&g, &h, 10.0).unwrap();
    let r = &h * DVector::from_vec(s.kappa.clone()) + DVector::from_column_slice(&g);
    assert!(r.amax() < 1e-12);
    assert!(!s.truncated && !s.least_squares && s.shift == 0.0);
}

#[test]
fn newton_step_shifts_indefinite_hessian_downhill() {
    let h = DMatrix::from_diagonal(&DVector::from_vec(vec![2.0, -1.0]));
    let g = [0.1, 0.1];
    let s = newton_step(&g, &h, 10.0).unwrap();
    assert!(s.shift > 1.0);
    let descent: f64 = s.kappa.iter().zip(&g).map(|(k, g)| k * g).sum();
    assert!(descent < 0.0);
}

#[test]
fn newton_step_flags_singular_hessian_and_truncates() {
    let h = DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, 0.0]));
    let s = newton_step(&[0.2, 0.3], &h, 10.0).unwrap();
    assert!(s.least_squares);
    assert!((s.kappa[0] + 0.2).abs() < 1e-12 && s.kappa[1] == 0.0);
    let t = newton_step(&[5.0, 0.0], &DMatrix::identity(2, 2), 0.5).unwrap();
    assert!(t.truncated);
    assert!((t.kappa[0] + 0.5).abs() < 1e-15);
    assert!(newton_step(&[1.0], &DMatrix::identity(2, 2), 0.5).is_err());
}

#[test]
fn quarter_turn_swaps_columns() {
    let c = DMatrix::identity(2, 2);
    let mask = PairMask::all(2);
    let r = rotate_orbitals(&c, &mask.to_matrix(&[std::f64::consts::FRAC_PI_2])).unwrap();
    assert!((r[(1, 0)].abs() - 1.0).abs() < 1e-12);
    assert!((r[(0, 1)].abs() - 1.0).abs() < 1e-12);
}

#[test]
fn repeated_rotations_stay_orthonormal() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let a = DMatrix::from_fn(5, 5, |_, _| rng.gen_range(-1.0..1.0));
    let s = &a * a.transpose() + DMatrix::identity(5, 5);
    let l = s.clone().cholesky().unwrap().l();
    let mut c = l.transpose().try_inverse().unwrap() * random_orthogonal(&mut rng, 5);
    let mask = PairMask::all(5);
    for _ in 0..100 {
        let k: Vec<f64> = (0..mask.len()).map(|_| rng.gen_range(-0.3..0.3)).collect();
        c = rotate_orbitals(&c, &mask.to_matrix(&k)).unwrap();
    }
    assert!(orthonormality_error(&c, &s) < 1e-12);
    assert!(rotate_orbitals(&c, &DMatrix::zeros(3, 3)).is_err());
}
