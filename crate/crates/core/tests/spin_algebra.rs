use endo_qca::linalg::{embed, phase_fidelity, propagator, ComplexMatrix};
use endo_qca::{spin_operators, Axis};
use num_complex::Complex64;
use proptest::prelude::*;

fn hermitian(dim: usize, raw: &[f64]) -> ComplexMatrix {
    let a = ComplexMatrix::from_fn(dim, dim, |r, c| Complex64::new(raw[2 * (r * dim + c)], raw[2 * (r * dim + c) + 1]));
    &(&a + &a.adjoint()) * 0.5
}

fn square(dim: usize, raw: &[f64]) -> ComplexMatrix {
    ComplexMatrix::from_fn(dim, dim, |r, c| Complex64::new(raw[2 * (r * dim + c)], raw[2 * (r * dim + c) + 1]))
}

proptest! {
    #[test]
    fn commutation_and_casimir(two_s in 1u32..=11) {
        let s = spin_operators(two_s).unwrap();
        let i = Complex64::i();
        let cyc = [(Axis::X, Axis::Y, Axis::Z), (Axis::Y, Axis::Z, Axis::X), (Axis::Z, Axis::X, Axis::Y)];
        for (a, b, c) in cyc {
            let lhs = s.axis(a).commutator(s.axis(b)).unwrap();
            let rhs = s.axis(c).scale(i);
            prop_assert!((&lhs - &rhs).max_abs() < 1e-12);
        }
        let sq = |m: &ComplexMatrix| m.matmul(m).unwrap();
        let casimir = &(&sq(&s.sx) + &sq(&s.sy)) + &sq(&s.sz);
        let ss = s.s() * (s.s() + 1.0);
        prop_assert!((&casimir - &(&ComplexMatrix::identity(s.dim()) * ss)).max_abs() < 1e-12);
    }

    #[test]
    fn propagators_are_unitary(raw in prop::collection::vec(-2.0f64..2.0, 32), angle in -10.0f64..10.0) {
        let h = hermitian(4, &raw);
        let p = propagator(&h, angle).unwrap();
        let err = (&p.adjoint().matmul(&p).unwrap() - &ComplexMatrix::identity(4)).max_abs();
        prop_assert!(err < 1e-12);
    }

    #[test]
    fn propagator_is_a_one_parameter_group(raw in prop::collection::vec(-1.0f64..1.0, 18), a in -3.0f64..3.0, b in -3.0f64..3.0) {
        let h = hermitian(3, &raw);
        let ab = propagator(&h, a).unwrap().matmul(&propagator(&h, b).unwrap()).unwrap();
        prop_assert!((&ab - &propagator(&h, a + b).unwrap()).max_abs() < 1e-11);
    }

    #[test]
    fn phase_fidelity_detects_global_phase(raw in prop::collection::vec(-1.0f64..1.0, 18), phi in -3.0f64..3.0) {
        let u = propagator(&hermitian(3, &raw), 1.0).unwrap();
        let v = u.scale(Complex64::from_polar(1.0, phi));
        let (fid, phase) = phase_fidelity(&v, &u).unwrap();
        prop_assert!((fid - 1.0).abs() < 1e-10);
        prop_assert!((Complex64::from_polar(1.0, phase) - Complex64::from_polar(1.0, phi)).norm() < 1e-10);
    }

    #[test]
    fn phase_fidelity_below_one_without_phase_relation(raw in prop::collection::vec(-1.0f64..1.0, 18), eps in 0.05f64..1.0) {
        // perturb one diagonal phase: no longer a global phase multiple
        let u = propagator(&hermitian(3, &raw), 1.0).unwrap();
        let mut d = ComplexMatrix::identity(3);
        d[(0, 0)] = Complex64::from_polar(1.0, eps);
        let v = d.matmul(&u).unwrap();
        let (fid, _) = phase_fidelity(&v, &u).unwrap();
        prop_assert!(fid < 1.0 - 1e-6);
    }

    #[test]
    fn embed_distributes_over_products(
        ra in prop::collection::vec(-1.0f64..1.0, 8),
        rb in prop::collection::vec(-1.0f64..1.0, 8),
        slot in 0usize..3,
    ) {
        let (a, b) = (square(2, &ra), square(2, &rb));
        let dims = [2, 2, 2];
        let lhs = embed(&a.matmul(&b).unwrap(), slot, &dims).unwrap();
        let rhs = embed(&a, slot, &dims).unwrap().matmul(&embed(&b, slot, &dims).unwrap()).unwrap();
        prop_assert!((&lhs - &rhs).max_abs() < 1e-12);
    }
}

#[test]
fn spin_half_is_pauli_over_two() {
    let s = spin_operators(1).unwrap();
    assert_eq!(s.sz[(0, 0)], Complex64::new(0.5, 0.0));
    assert_eq!(s.sx[(0, 1)], Complex64::new(0.5, 0.0));
    assert_eq!(s.sy[(0, 1)], Complex64::new(0.0, -0.5));
}

#[test]
fn rejects_zero_spin() {
    assert!(spin_operators(0).is_err());
}
