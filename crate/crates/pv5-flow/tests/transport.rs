use proptest::prelude::*;
use pv5_flow::{
    integrate, integrate_with, refine_from_series, refine_with, seed_state, FlowError, FlowOptions, FlowState,
    RefineOptions, SeedOptions,
};
use pv5_series::{series_a_pair_unchecked, Parameters, Truncation};
use pv5_special::{c64, C2Matrix, Complex64};

fn p1() -> Parameters {
    Parameters::real(0.21, 0.16, 0.11, c64(0.24, 0.05), c64(1.0, 0.0), c64(0.7, 0.2))
}

fn raw_seed(r: f64) -> FlowState {
    seed_state(&p1(), r, &SeedOptions { truncation: Truncation::L1, project: false }).unwrap().0
}

#[test]
fn zero_length_transport_is_identity() {
    let s = raw_seed(200.0);
    assert_eq!(integrate(&s, s.x, 1e-12).unwrap(), s);
}

#[test]
fn transported_seed_tracks_the_series() {
    let s = raw_seed(200.0);
    let end = integrate(&s, c64(0.0, 60.0), 1e-12).unwrap();
    let series = series_a_pair_unchecked(&p1(), c64(0.0, 60.0), Truncation::L1).unwrap();
    let err = (end.a0 - series.a0).max_abs().max((end.ax - series.ax).max_abs());
    // Truncation scale at 60i: the omitted terms are of size |x|^(Re σ - 2) times O(1) constants.
    let scale = 60f64.powf(0.24 - 2.0);
    assert!(err < 0.1 * scale, "{err:e} vs {scale:e}");
}

#[test]
fn determinants_are_conserved() {
    let s = raw_seed(300.0);
    let (end, report) = integrate_with(&s, &[c64(0.0, 40.0)], &FlowOptions::default()).unwrap();
    assert!((end.a0.det() - s.a0.det()).norm() < 1e-10);
    assert!((end.ax.det() - s.ax.det()).norm() < 1e-10);
    assert!(report.max_drift <= 100.0 * 1e-12, "{:e}", report.max_drift);
    assert!((end.a0.trace()).norm() < 1e-12 && (end.ax.trace()).norm() < 1e-12);
}

#[test]
fn forward_then_backward_returns() {
    let s = raw_seed(120.0);
    let there = integrate(&s, c64(0.0, 50.0), 1e-12).unwrap();
    let back = integrate(&there, s.x, 1e-12).unwrap();
    assert!(back.distance(&s) < 1000.0 * 1e-12, "{:e}", back.distance(&s));
}

#[test]
fn polyline_detour_agrees_with_straight_path() {
    let s = raw_seed(120.0);
    let straight = integrate(&s, c64(0.0, 50.0), 1e-12).unwrap();
    let (detour, _) = integrate_with(&s, &[c64(3.0, 90.0), c64(-2.0, 70.0), c64(0.0, 50.0)], &FlowOptions::default()).unwrap();
    assert!(detour.distance(&straight) < 1e-9);
}

#[test]
fn refinement_converges_under_seed_doubling() {
    let r = refine_from_series(&p1(), 400.0, c64(0.0, 40.0), 1e-12).unwrap();
    assert!(r.convergence.unwrap() <= 1e-6, "{:?}", r.convergence);
    assert!(r.state.constraint_defect() < 1e-10);
    assert_eq!(r.state.x, c64(0.0, 40.0));
}

#[test]
fn zero_parameters_give_the_zero_solution() {
    let z = Complex64::new(0.0, 0.0);
    let p = Parameters::new(z, z, z, z, c64(1.0, 0.0), c64(1.0, 0.0));
    let r = refine_from_series(&p, 200.0, c64(0.0, 30.0), 1e-12).unwrap();
    assert_eq!(r.state.a0.max_abs(), 0.0);
    assert_eq!(r.state.ax.max_abs(), 0.0);
}

#[test]
fn target_at_seed_reproduces_series() {
    let mut o = RefineOptions::new(200.0, c64(0.0, 200.0), 1e-12);
    o.seed.project = false;
    o.convergence_check = false;
    let r = refine_with(&p1(), &o).unwrap();
    let series = series_a_pair_unchecked(&p1(), c64(0.0, 200.0), Truncation::L1).unwrap();
    assert_eq!(r.state.a0, series.a0);
    assert_eq!(r.state.ax, series.ax);
}

#[test]
fn preconditions_are_enforced() {
    assert!(matches!(refine_from_series(&p1(), 400.0, c64(0.0, 10.0), 1e-12), Err(FlowError::TargetTooClose(_))));
    let wild = p1().with_sigma(c64(0.9, 0.0));
    assert!(matches!(refine_from_series(&wild, 400.0, c64(0.0, 40.0), 1e-12), Err(FlowError::Series(_))));
}

#[test]
fn blow_up_is_reported_as_step_underflow() {
    let s = raw_seed(200.0);
    let o = FlowOptions { blowup: 0.05, ..FlowOptions::default() };
    let e = integrate_with(&s, &[c64(0.0, 40.0)], &o).unwrap_err();
    assert!(matches!(e, FlowError::StepUnderflow { .. }), "{e}");
}

fn entry() -> impl Strategy<Value = Complex64> {
    (-0.5..0.5f64, -0.5..0.5f64).prop_map(|(a, b)| c64(a, b))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]
    #[test]
    fn invariants_survive_short_flows(
        f0 in entry(), fp in entry(), fm in entry(), gp in entry(), gm in entry(),
        ti in -0.5..0.5f64, y in 5.0..30.0f64, dy in -3.0..3.0f64, dx in -2.0..2.0f64,
    ) {
        let params = Parameters::real(0.2, 0.2, ti, c64(0.1, 0.0), c64(1.0, 0.0), c64(1.0, 0.0));
        let a0 = C2Matrix::traceless(f0, fp, fm);
        let ax = C2Matrix::traceless(-ti / 2.0 - f0, gp, gm);
        let s = FlowState { x: c64(0.0, y), a0, ax, params };
        let end = integrate(&s, c64(dx, y + dy), 1e-12).unwrap();
        let d = end.invariants().distance(&s.invariants());
        prop_assert!(d <= 100.0 * 1e-12, "drift {:e}", d);
    }
}
