mod common;

use common::dense::*;
use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use saoovqe::sim::*;
use saoovqe::Error;
use std::f64::consts::PI;

#[test]
fn x_on_qubit_one_flips_second_character() {
    let s = StateVector::from_bits("0000").unwrap();
    let out = apply_gate(&s, &Gate::x(1)).unwrap();
    assert_eq!(out, StateVector::from_bits("0100").unwrap());
}

#[test]
fn ry_zero_is_identity() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let s = random_state(&mut rng, 3);
    for q in 0..3 {
        assert_eq!(apply_gate(&s, &Gate::ry(q, 0.0)).unwrap(), s);
    }
}

#[test]
fn ry_half_pi_matches_dense_matrix() {
    let s = StateVector::from_bits("00").unwrap();
    let out = apply_gate(&s, &Gate::ry(0, PI / 2.0)).unwrap();
    let g = Gate::ry(0, PI / 2.0);
    let want = one_qubit(2, 0, &g.dense()) * vec_of(&s);
    assert!(max_diff(out.amplitudes(), want.as_slice()) < 1e-15);
    let r = std::f64::consts::FRAC_1_SQRT_2;
    assert!((out.amplitudes()[0].re - r).abs() < 1e-15);
    assert!((out.amplitudes()[2].re - r).abs() < 1e-15);
}

#[test]
fn gate_errors() {
    let s = StateVector::zero_state(2);
    assert!(matches!(s.apply_gate(&Gate::x(2)), Err(Error::QubitOutOfRange { .. })));
    assert!(matches!(s.apply_gate(&Gate::cnot(1, 1)), Err(Error::ControlEqualsTarget(1))));
    assert!(matches!(s.apply_gate(&Gate::cnot(3, 1)), Err(Error::QubitOutOfRange { .. })));
}

#[test]
fn gate_matrices_are_unitary() {
    for g in [
        Gate::x(0),
        Gate::z(0),
        Gate::h(0),
        Gate::ry(0, 0.83),
        Gate::cnot(0, 1),
        Gate::ch(0, 1),
        Gate::cry(0, 1, -1.4),
    ] {
        let m = g.dense();
        let err = (m.adjoint() * &m - DMatrix::identity(m.nrows(), m.nrows())).camax();
        assert!(err < 1e-15, "{g:?}: {err}");
    }
}

#[test]
fn every_gate_matches_dense_embedding() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let n = 4;
    for _ in 0..40 {
        let s = random_state(&mut rng, n);
        let t = rng.gen_range(0..n);
        let mut ctl = rng.gen_range(0..n);
        while ctl == t {
            ctl = rng.gen_range(0..n);
        }
        let a = rng.gen_range(-3.0..3.0);
        for g in [
            Gate::x(t),
            Gate::z(t),
            Gate::h(t),
            Gate::ry(t, a),
            Gate::cnot(ctl, t),
            Gate::ch(ctl, t),
            Gate::cry(ctl, t, a),
        ] {
            let u = DMatrix::from_fn(2, 2, |i, j| g.target_matrix()[i][j]);
            let m = match g.control {
                None => one_qubit(n, t, &u),
                Some(cq) => controlled(n, cq, t, &u),
            };
            let want = m * vec_of(&s);
            let got = s.apply_gate(&g).unwrap();
            assert!(max_diff(got.amplitudes(), want.as_slice()) < 1e-12, "{g:?}");
            assert!((got.norm_sqr() - 1.0).abs() < 1e-12);
        }
    }
}

#[test]
fn pauli_exponential_zero_angle_is_identity() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let s = random_state(&mut rng, 3);
    let p = PauliString::parse("XYZ").unwrap();
    assert_eq!(apply_pauli_exponential(&s, &p, 0.0).unwrap(), s);
}

#[test]
fn z_exponential_on_one_gives_i() {
    let s = StateVector::from_bits("1").unwrap();
    let out = apply_pauli_exponential(&s, &PauliString::parse("Z").unwrap(), PI).unwrap();
    assert!((out.amplitudes()[1] - Complex64::new(0.0, 1.0)).norm() < 1e-15);
    assert!(out.amplitudes()[0].norm() < 1e-15);
}

#[test]
fn pauli_exponential_matches_dense_expm() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..30 {
        let p = random_string(&mut rng, 4);
        let s = random_state(&mut rng, 4);
        let angle = if rng.gen_bool(0.2) { 0.37 } else { rng.gen_range(-4.0..4.0) };
        let gen = pauli_matrix(&p) * Complex64::new(0.0, -angle / 2.0);
        let want = gen.exp() * vec_of(&s);
        let got = apply_pauli_exponential(&s, &p, angle).unwrap();
        assert!(max_diff(got.amplitudes(), want.as_slice()) < 1e-12, "{p}");
    }
}

#[test]
fn pauli_exponential_qubit_mismatch() {
    let s = StateVector::zero_state(2);
    let p = PauliString::parse("XXX").unwrap();
    assert!(matches!(
        apply_pauli_exponential(&s, &p, 0.1),
        Err(Error::QubitCountMismatch { expected: 2, found: 3 })
    ));
}

#[test]
fn expectation_basics() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let s = random_state(&mut rng, 3);
    let one = PauliSum::identity(3);
    assert!((expectation(&s, &one).unwrap() - 1.0).norm() < 1e-14);
    let z0 = PauliSum::from_term(PauliString::parse("ZI").unwrap(), Complex64::new(1.0, 0.0));
    let st = StateVector::from_bits("10").unwrap();
    assert_eq!(expectation(&st, &z0).unwrap(), Complex64::new(-1.0, 0.0));
}

#[test]
fn expectation_and_transition_match_dense() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for _ in 0..20 {
        let op = random_hermitian(&mut rng, 3, 6);
        let a = random_state(&mut rng, 3);
        let b = random_state(&mut rng, 3);
        let m = sum_matrix(&op);
        let want = (vec_of(&a).adjoint() * &m * vec_of(&a))[(0, 0)];
        let got = expectation(&a, &op).unwrap();
        assert!((got - want).norm() < 1e-12);
        assert!(got.im.abs() < 1e-12);
        let want = (vec_of(&a).adjoint() * &m * vec_of(&b))[(0, 0)];
        assert!((transition_element(&a, &op, &b).unwrap() - want).norm() < 1e-12);
        assert!((transition_element(&a, &op, &a).unwrap() - expectation(&a, &op).unwrap()).norm() < 1e-15);
        let sp = op.to_sparse();
        assert!((sparse_expectation(&a, &sp).unwrap() - got.re).abs() < 1e-12);
    }
}

#[test]
fn transition_of_orthogonal_states_under_identity() {
    let a = StateVector::from_bits("01").unwrap();
    let b = StateVector::from_bits("10").unwrap();
    assert_eq!(transition_element(&a, &PauliSum::identity(2), &b).unwrap(), Complex64::new(0.0, 0.0));
    assert!(transition_element(&a, &PauliSum::identity(3), &b).is_err());
}

#[test]
fn pauli_products_match_dense() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..200 {
        let a = random_string(&mut rng, 5);
        let b = random_string(&mut rng, 5);
        let (ph, s) = a.mul(&b);
        let want = pauli_matrix(&a) * pauli_matrix(&b);
        let got = pauli_matrix(&s) * ph;
        assert!((want - got).camax() < 1e-15);
        assert_eq!(a.commutes_with(&b), {
            let (ph2, _) = b.mul(&a);
            (ph - ph2).norm() < 1e-15
        });
        assert!((a.dense() - pauli_matrix(&a)).camax() < 1e-15);
    }
}

#[test]
fn sum_algebra_matches_dense() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let a = random_hermitian(&mut rng, 3, 5);
    let b = random_hermitian(&mut rng, 3, 5).scale(Complex64::new(0.3, 0.7));
    let (ma, mb) = (sum_matrix(&a), sum_matrix(&b));
    assert!((sum_matrix(&a.mul(&b)) - &ma * &mb).camax() < 1e-13);
    assert!((sum_matrix(&b.adjoint()) - mb.adjoint()).camax() < 1e-13);
    assert!((sum_matrix(&a.commutator(&b)) - (&ma * &mb - &mb * &ma)).camax() < 1e-13);
    assert!((a.dense() - ma).camax() < 1e-13);
    assert!(a.is_hermitian(0.0));
    assert!(!b.is_hermitian(1e-3));
}

#[test]
fn combined_form_has_unique_strings() {
    let p = PauliString::parse("XZ").unwrap();
    let mut s = PauliSum::zero(2);
    s.add_term(p, Complex64::new(1.0, 0.0));
    s.add_term(p, Complex64::new(0.5, 0.0));
    assert_eq!(s.len(), 1);
    assert_eq!(s.coefficient(&p), Complex64::new(1.5, 0.0));
    s.add_term(p, Complex64::new(-1.5, 0.0));
    assert!(s.is_empty());
}

#[test]
fn parse_and_display_round_trip() {
    let p = PauliString::parse("IXYZ").unwrap();
    assert_eq!(p.to_string(), "IXYZ");
    assert_eq!(p.get(2), Pauli::Y);
    assert_eq!(p.weight(), 3);
    assert_eq!(p.support(), vec![1, 2, 3]);
    assert!(PauliString::parse("IXQ").is_err());
    assert!(PauliString::identity(4).is_identity());
}

#[test]
fn long_random_circuits_keep_norm() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let n = 6;
    let mut s = random_state(&mut rng, n);
    for k in 0..10_000 {
        if k % 2 == 0 {
            let p = random_string(&mut rng, n);
            s.apply_pauli_exponential_mut(&p, rng.gen_range(-3.0..3.0)).unwrap();
        } else {
            let t = rng.gen_range(0..n);
            let ctl = (t + rng.gen_range(1..n)) % n;
            let g = match rng.gen_range(0..4) {
                0 => Gate::h(t),
                1 => Gate::ry(t, rng.gen_range(-3.0..3.0)),
                2 => Gate::ch(ctl, t),
                _ => Gate::cry(ctl, t, rng.gen_range(-3.0..3.0)),
            };
            s.apply_gate_mut(&g).unwrap();
        }
    }
    assert!((s.norm_sqr() - 1.0).abs() < 1e-10);
}

fn arb_string(n: usize) -> impl Strategy<Value = PauliString> {
    prop::collection::vec(0..4usize, n).prop_map(|v| {
        let ops: Vec<Pauli> = v.into_iter().map(|k| [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z][k]).collect();
        PauliString::from_ops(&ops)
    })
}

proptest! {
    #[test]
    fn exponentials_compose(p in arb_string(4), a in -3.0f64..3.0, b in -3.0f64..3.0, seed in 0u64..1000) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = random_state(&mut rng, 4);
        let two = s.apply_pauli_exponential(&p, a).unwrap().apply_pauli_exponential(&p, b).unwrap();
        let one = s.apply_pauli_exponential(&p, a + b).unwrap();
        prop_assert!(max_diff(two.amplitudes(), one.amplitudes()) < 1e-12);
        prop_assert!((one.norm_sqr() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn pauli_squares_to_identity(p in arb_string(6)) {
        let (ph, s) = p.mul(&p);
        prop_assert!(s.is_identity());
        prop_assert!((ph - Complex64::new(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn product_phase_is_associative(a in arb_string(5), b in arb_string(5), c in arb_string(5)) {
        let (p1, ab) = a.mul(&b);
        let (p2, abc) = ab.mul(&c);
        let (q1, bc) = b.mul(&c);
        let (q2, abc2) = a.mul(&bc);
        prop_assert_eq!(abc, abc2);
        prop_assert!((p1 * p2 - q1 * q2).norm() < 1e-15);
    }
}
