use num::complex::Complex64;

use super::*;
use crate::fixtures;
use crate::scheme::scheme;

fn single_mode_exact(a: f64, t: f64) -> Complex64 {
    // u_1 = a e^{-it} e^{-i a² t}
    Complex64::from_polar(a, -t - a * a * t)
}

#[test]
fn zero_data_stays_zero() {
    let mut st = Stepper::new(1, 2, 8, 1.0).unwrap();
    let u0 = DataProfile::Zero.generate(8, 0).unwrap();
    assert_eq!(st.run(&u0, 0.1, 3).unwrap(), u0);
}

#[test]
fn bad_grid_is_rejected() {
    assert!(matches!(GridState::zeros(7), Err(NlsError::Modes(7))));
    assert!(matches!(DataProfile::Sobolev { amplitude: 1.0, gamma: 0.5 }.generate(8, 0), Err(NlsError::Gamma(_))));
}

#[test]
fn linear_flow_is_exact() {
    let mut st = Stepper::new(2, 2, 16, 0.0).unwrap();
    let u0 = DataProfile::Smooth { amplitude: 1.0 }.generate(16, 3).unwrap();
    let tau = 0.37;
    let got = st.step(&u0, tau).unwrap();
    let want = u0.untwist(tau);
    assert!(got.diff(&want).sobolev_norm(0.0) < 1e-14);
}

#[test]
fn single_mode_first_order_step() {
    let mut st = Stepper::new(1, 2, 8, 1.0).unwrap();
    let a = 0.5;
    let u0 = DataProfile::SingleMode { amplitude: a, k: 1 }.generate(8, 0).unwrap();
    let mut errs = Vec::new();
    for j in 3..8 {
        let tau = 0.5f64.powi(j);
        let u = st.step(&u0, tau).unwrap();
        let mut e = (u.get(1) - single_mode_exact(a, tau)).norm_sqr();
        e += u.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>() - u.get(1).norm_sqr();
        errs.push((tau, e.sqrt()));
    }
    let fit = fit_order(&errs).unwrap();
    assert!((fit.slope - 2.0).abs() < 0.1, "{fit:?}");
}

#[test]
fn reference_matches_single_mode_closed_form() {
    let a = 0.7;
    let u0 = DataProfile::SingleMode { amplitude: a, k: 1 }.generate(8, 0).unwrap();
    let t = 0.3;
    let u = collocation_solve(&u0, t, 1.0, REFERENCE_STEP);
    assert!((u.get(1) - single_mode_exact(a, t)).norm() < 1e-12);
    let r = rk4_solve(&u0, t, 1.0, 2000);
    assert!((r.get(1) - single_mode_exact(a, t)).norm() < 1e-10);
}

#[test]
fn reference_cross_validates_on_smooth_data() {
    let u0 = DataProfile::Smooth { amplitude: 1.0 }.generate(16, 2).unwrap();
    let cc = cross_validate(&u0, 1.0 / 64.0, 1.0, 1e-8).unwrap();
    assert!(cc.passed());
}

#[test]
fn first_order_term_of_second_order_stepper_is_the_two_term_form() {
    let st = Stepper::new(2, 2, 8, 1.0).unwrap();
    let eq = EquationSpec::cubic_nls();
    let (full, got, _) = st.schemes().find(|(t, _, _)| t.order() == 1).unwrap();
    assert_eq!(full.children(), &[fixtures::letter()]);
    let free = ExpPoly::exp(eq.edge_phase(full.edge(), full.freq()));
    let want = free.mul(&scheme(&fixtures::letter(), 2, 2, &eq).unwrap());
    assert!(got.equals(&want), "{got}");
}

#[test]
fn resonant_tuples_fall_back() {
    // k1 = 0 makes 2k1² vanish in the first-order tree at r = 2
    let mut st = Stepper::new(2, 2, 8, 1.0).unwrap();
    let u0 = DataProfile::Smooth { amplitude: 0.3 }.generate(8, 5).unwrap();
    let u = st.step(&u0, 0.01).unwrap();
    assert!(u.is_finite());
}
