use proptest::prelude::*;

use pv5_special::{branched_power, c64, eigvals2, gamma, BranchedLog, C2Matrix, Complex64};

fn cx() -> impl Strategy<Value = Complex64> {
    (-3.0..3.0f64, -3.0..3.0f64).prop_map(|(a, b)| c64(a, b))
}

fn mat() -> impl Strategy<Value = C2Matrix> {
    (cx(), cx(), cx(), cx()).prop_map(|(a, b, c, d)| C2Matrix::new(a, b, c, d))
}

proptest! {
    #[test]
    fn product_is_associative(a in mat(), b in mat(), c in mat()) {
        let d = (a * b) * c - a * (b * c);
        prop_assert!(d.max_abs() <= 1e-12 * (1.0 + a.max_abs() * b.max_abs() * c.max_abs()));
        prop_assert_eq!(a * C2Matrix::I, a);
        prop_assert_eq!(C2Matrix::I * a, a);
    }

    #[test]
    fn inverse_is_two_sided(a in mat()) {
        prop_assume!(a.det().norm() > 1e-3);
        let inv = a.inv().unwrap();
        let scale = 1.0 + a.max_abs() * inv.max_abs();
        prop_assert!((a * inv - C2Matrix::I).max_abs() <= 1e-12 * scale);
        prop_assert!((inv * a - C2Matrix::I).max_abs() <= 1e-12 * scale);
    }

    #[test]
    fn eigenvalues_solve_the_characteristic_equation(a in mat()) {
        let (l1, l2) = eigvals2(&a);
        for l in [l1, l2] {
            let r = (a - C2Matrix::I * l).det();
            let scale = 1.0 + a.max_abs().powi(2) + l.norm_sqr();
            prop_assert!(r.norm() <= 1e-12 * scale);
        }
        prop_assert!(l1.re > l2.re || (l1.re == l2.re && l1.im >= l2.im));
    }

    #[test]
    fn branched_power_is_additive(r in 0.1..50.0f64, arg in -10.0..10.0f64, a in cx(), b in cx()) {
        let base = BranchedLog::with_arg(r, arg);
        let lhs = branched_power(&base, a + b);
        let rhs = branched_power(&base, a) * branched_power(&base, b);
        prop_assert!((lhs - rhs).norm() <= 1e-12 * lhs.norm().max(1e-300) + 1e-300);
    }

    #[test]
    fn branched_log_reproduces_point(re in -50.0..50.0f64, im in -50.0..50.0f64, hint in -20.0..20.0f64) {
        let z = c64(re, im);
        prop_assume!(z.norm() > 1e-6);
        let l = BranchedLog::near(z, hint);
        prop_assert!((l.point() - z).norm() <= 1e-13 * z.norm());
        prop_assert!((l.tracked_arg - hint).abs() <= std::f64::consts::PI + 1e-12);
    }

    #[test]
    fn gamma_conjugate_symmetry(z in cx()) {
        prop_assume!((z - z.re.round()).norm() > 1e-6);
        let a = gamma(z.conj()).unwrap();
        let b = gamma(z).unwrap().conj();
        prop_assert!((a - b).norm() <= 1e-13 * b.norm());
    }
}
