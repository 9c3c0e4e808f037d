use std::f64::consts::PI;

use proptest::prelude::*;
use pv5_closed_form::{
    closed_form_constructions, closed_form_factors, closed_form_monodromy, entry_formulas, s_star, s_star_star,
    v_generic, ClosedFormError, DeltaStar,
};
use pv5_series::Parameters;
use pv5_special::{c64, C2Matrix, Complex64};

fn p1() -> Parameters {
    Parameters::real(0.21, 0.16, 0.11, c64(0.24, 0.05), c64(1.0, 0.0), c64(0.7, 0.2))
}

fn r(x: f64) -> Complex64 {
    c64(x, 0.0)
}

#[test]
fn mx11_at_a_rational_point() {
    let p = Parameters::real(0.3, 0.2, 1.0 / 3.0, r(0.2), r(1.0), r(1.0));
    let e = entry_formulas(&p).unwrap();
    // mpmath: exp(-4πi/15)
    assert!((e.mx_11 - c64(0.669130606358858214, -0.743144825477394235)).norm() < 1e-15);
}

#[test]
fn v0_entry_at_a_rational_point() {
    let v = v_generic(r(0.0), r(1.0 / 3.0), r(0.0));
    // mpmath: e^{-πi/6} Γ(-1/3) / Γ(5/6)
    assert!((v.a11 - c64(-3.11670980670006997, 1.79943324588423188)).norm() < 1e-13);
}

#[test]
fn v0_determinant_is_reciprocal_theta() {
    for (s, t, ti) in [(c64(0.24, 0.05), 0.21, 0.11), (c64(-0.7, 0.3), 1.37, -0.4), (c64(0.1, -1.0), -0.63, 0.9)] {
        let v = v_generic(s, r(t), r(ti));
        assert!((v.det() - r(1.0 / t)).norm() < 1e-12 * (1.0 / t).abs().max(1.0), "{}", v.det());
    }
}

#[test]
fn stokes_factors_are_unit_triangular() {
    let a = s_star(c64(0.3, 0.2), r(0.4), r(0.1));
    let b = s_star_star(c64(0.3, 0.2), r(0.4), r(0.1));
    assert_eq!(a.a12, r(0.0));
    assert_eq!(b.a21, r(0.0));
    assert_eq!(a.det(), r(1.0));
    assert_eq!(b.det(), r(1.0));
    // σ - 2θ0 - θ∞ = 0: the reciprocal Gamma vanishes
    let z = s_star(r(0.9), r(0.4), r(0.1));
    assert!(z.a21.norm() < 1e-14);
}

#[test]
fn traces_and_product_identity() {
    let md = closed_form_monodromy(&p1()).unwrap();
    let p = p1();
    let d = md.defects(p.theta0, p.thetax, p.thetainf);
    assert!(d.trace_mx < 1e-12 && d.trace_m0 < 1e-12, "{d:?}");
    assert!(d.stokes_trace < 1e-10 && d.det_m0 < 1e-12 && d.det_mx < 1e-12);
    assert!(d.corner < 1e-12);
}

#[test]
fn first_connection_relation() {
    let p = p1();
    let f = closed_form_factors(&p).unwrap();
    let md = closed_form_monodromy(&p).unwrap();
    let lhs = md.s1_matrix * md.mx * md.m0 * md.mx.inv_sl2() * md.s1_matrix.inv_sl2();
    let rhs = f.c01.inv().unwrap() * C2Matrix::exp_j(c64(0.0, PI) * p.theta0) * f.c01;
    assert!((lhs - rhs).max_abs() < 1e-10);
}

#[test]
fn second_connection_relation() {
    let p = p1();
    let f = closed_form_factors(&p).unwrap();
    let md = closed_form_monodromy(&p).unwrap();
    let lhs = md.s2_matrix.inv_sl2() * md.m0 * md.s2_matrix;
    let rhs = f.c02.inv().unwrap() * f.e0 * f.c02;
    assert!((lhs - rhs).max_abs() < 1e-12);
}

#[test]
fn zero_constants_are_rejected() {
    let p = Parameters::real(0.21, 0.16, 0.11, c64(0.24, 0.05), r(0.0), r(1.0));
    assert_eq!(closed_form_monodromy(&p), Err(ClosedFormError::ZeroConstant("c0")));
}

#[test]
fn digamma_pole_is_a_resonance() {
    let p = Parameters::real(0.0, 0.16, 0.11, r(0.11), r(1.0), r(0.7));
    assert!(matches!(closed_form_monodromy(&p), Err(ClosedFormError::Resonance(_))));
}

#[test]
fn integer_branch_dispatch() {
    let f = closed_form_factors(&Parameters::real(2.0, -1.0, 0.11, c64(0.24, 0.05), r(1.0), r(0.7))).unwrap();
    assert_eq!(f.integer_case_0.unwrap().delta, DeltaStar::Plus);
    assert_eq!(f.integer_case_x.unwrap().delta, DeltaStar::Minus);
    assert_eq!(f.e0, C2Matrix::I + C2Matrix::DELTA_PLUS * c64(0.0, 2.0 * PI));
    assert_eq!(f.ex, (C2Matrix::I + C2Matrix::DELTA_MINUS * c64(0.0, 2.0 * PI)) * -1.0);
    let c = closed_form_constructions(&Parameters::real(2.0, 0.16, 0.11, c64(0.24, 0.05), r(1.0), r(0.7))).unwrap();
    assert!(c.entrywise.is_none());
}

fn with_thetas(t0: f64, tx: f64) -> Parameters {
    Parameters::real(t0, tx, 0.11, c64(0.24, 0.05), r(1.0), c64(0.7, 0.2))
}

#[test]
fn integer_limits_are_continuous() {
    for n in [0.0, 1.0, 2.0, 3.0, -1.0, -2.0] {
        let at0 = closed_form_monodromy(&with_thetas(n, 0.16)).unwrap();
        let atx = closed_form_monodromy(&with_thetas(0.21, n)).unwrap();
        for d in [1e-3, 1e-4] {
            let near0 = closed_form_monodromy(&with_thetas(n + d, 0.16)).unwrap();
            let nearx = closed_form_monodromy(&with_thetas(0.21, n + d)).unwrap();
            assert!(near0.distance(&at0) <= 10.0 * d, "θ0 = {n} + {d}: {:e}", near0.distance(&at0));
            assert!(nearx.distance(&atx) <= 10.0 * d, "θx = {n} + {d}: {:e}", nearx.distance(&atx));
        }
    }
}

#[test]
fn integer_branch_keeps_structural_identities() {
    for (t0, tx) in [(1.0, 0.16), (0.21, -2.0), (2.0, 1.0)] {
        let p = with_thetas(t0, tx);
        let d = closed_form_monodromy(&p).unwrap().defects(p.theta0, p.thetax, p.thetainf);
        assert!(d.within(1e-10, 1e-10), "{t0} {tx}: {d:?}");
    }
}

fn frac() -> impl Strategy<Value = f64> {
    // θ bounded away from the integers by 0.05
    (-2i32..2, 0.05..0.95f64).prop_map(|(k, f)| k as f64 + f)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]
    #[test]
    fn constructions_agree(
        t0 in frac(), tx in frac(), ti in -0.9..0.9f64,
        sr in -0.9..0.9f64, si in -0.5..0.5f64,
        c0r in 0.3..2.0f64, c0a in -3.0..3.0f64, cxr in 0.3..2.0f64, cxa in -3.0..3.0f64,
    ) {
        let p = Parameters::real(t0, tx, ti, c64(sr, si), Complex64::from_polar(c0r, c0a), Complex64::from_polar(cxr, cxa));
        let c = closed_form_constructions(&p).unwrap();
        let scale = 1f64.max(c.structural.m0.max_abs()).max(c.structural.mx.max_abs());
        prop_assert!(c.gap().unwrap() <= 1e-10 * scale, "gap {:e} scale {scale}", c.gap().unwrap());
        prop_assert!(c.stokes_check <= 1e-10 * scale);
    }
}
