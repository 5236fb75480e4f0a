//! Frozen reference values. Each constant was computed with an independent
//! arbitrary-precision implementation and agrees with the in-crate reference
//! routes in `appell_core::oracle`; both the library and those routes are
//! checked against it here.

use std::f64::consts::PI;

use appell_core::bessel::{bessel_k, BesselOrder};
use appell_core::ext_appell::{f1pv, f1pv_integral, f1pv_series, EvaluationMethod, ExtendedAppellInput};
use appell_core::ext_beta::{chaudhry_beta, extended_beta, ExtensionParams};
use appell_core::hyper::{appell_f1_integral, appell_f1_series, pfq_with_tol, AppellParams, PfqParams, SeriesControl};
use appell_core::mellin::{
    kernel_mellin_closed, kernel_mellin_numeric, mellin_forward_closed, mellin_forward_numeric, mellin_inverse_numeric,
    InversionContour, MellinClosedForm, MellinPoint,
};
use appell_core::oracle;
use appell_core::quadrature::QuadratureConfig;
use appell_core::scalar::{pochhammer, upper_incomplete_gamma};
use appell_core::ComplexScalar;

const UPPER_GAMMA_2_5_AT_1: f64 = 1.128802791889102286;
const K_0_8_AT_1_5: f64 = 0.2527724308653964949;
const K_1_3_AT_300: f64 = 3.734180563839758011e-132;
const K_0_3_AT_1_2: f64 = 0.3276932312353650;
const HYP2F1_HALF_HALF_THREE_HALVES_AT_HALF: f64 = 1.110720734539591562;
const APPELL_F1_111_2_AT_03_05: f64 = 1.682361183106064638;
const CHAUDHRY_B_2_2_P1: f64 = 1.623023972519449032e-3;
const CHAUDHRY_B_3_4_P1: f64 = 1.891905230785379e-4;
const EXTENDED_B_2_3_P1_NU1: f64 = 1.000702509338262e-3;
const F1PV_111_3_AT_03_04_P1_NU05: f64 = 1.092873469696065e-2;
/// `∫₀^∞ p^{1/2} F_{1,p,1/2}(1,1,1;3;0.3,0.4) dp`, by direct two-dimensional quadrature.
const MELLIN_111_3_AT_03_04_NU05_S15: f64 = 0.1289246145091532797;

fn c(x: f64) -> ComplexScalar {
    ComplexScalar::new(x, 0.0)
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn crel(a: ComplexScalar, b: f64) -> f64 {
    (a - b).norm() / b.abs()
}

fn quad() -> QuadratureConfig {
    QuadratureConfig::default()
}

fn input(appell: AppellParams, p: f64, nu: f64) -> ExtendedAppellInput {
    ExtendedAppellInput::new(appell, ExtensionParams::real(p, nu).unwrap())
}

#[test]
fn pochhammer_of_one_is_factorial() {
    assert!((pochhammer(c(1.0), c(4.0)).unwrap() - 24.0).norm() < 1e-12);
}

#[test]
fn upper_incomplete_gamma_value() {
    assert!(rel(upper_incomplete_gamma(2.5, 1.0).unwrap(), UPPER_GAMMA_2_5_AT_1) < 1e-12);
    assert!(rel(oracle::upper_incomplete_gamma(2.5, 1.0, 20_000), UPPER_GAMMA_2_5_AT_1) < 1e-12);
}

#[test]
fn bessel_k_values() {
    let k = |nu: f64, z: f64| bessel_k(BesselOrder::new(nu).unwrap(), c(z)).unwrap();
    assert!(crel(k(0.8, 1.5), K_0_8_AT_1_5) < 1e-13);
    assert!(crel(k(0.3, 1.2), K_0_3_AT_1_2) < 1e-13);
    assert!(rel(oracle::bessel_k(0.8, 1.5, 400), K_0_8_AT_1_5) < 1e-13);
    assert!(crel(k(1.3, 300.0), K_1_3_AT_300) < 1e-12);
    // four terms of the large-argument expansion
    let (nu, z) = (1.3f64, 300.0f64);
    let mu = 4.0 * nu * nu;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..4 {
        let j = (2 * k - 1) as f64;
        term *= (mu - j * j) / (k as f64 * 8.0 * z);
        sum += term;
    }
    let asymptotic = (PI / (2.0 * z)).sqrt() * (-z).exp() * sum;
    assert!(crel(k(nu, z), asymptotic) < 1e-9);
}

#[test]
fn bessel_half_order_closed_form() {
    let v = bessel_k(BesselOrder::new(0.5).unwrap(), c(1.0)).unwrap();
    assert!(crel(v, (PI / 2.0).sqrt() * (-1f64).exp()) < 1e-15);
}

#[test]
fn gauss_hypergeometric_value() {
    let p = PfqParams::new(vec![c(0.5), c(0.5)], vec![c(1.5)], c(0.5));
    let v = pfq_with_tol(&p, 1e-15, 4000).unwrap();
    assert!(crel(v, HYP2F1_HALF_HALF_THREE_HALVES_AT_HALF) < 1e-14);
}

#[test]
fn appell_f1_value_both_routes() {
    let a = AppellParams::real(1.0, 1.0, 1.0, 2.0, 0.3, 0.5);
    let series = appell_f1_series(&a, &SeriesControl::default()).unwrap();
    let integral = appell_f1_integral(&a, &quad()).unwrap();
    assert!(crel(series, APPELL_F1_111_2_AT_03_05) < 1e-12);
    assert!(crel(integral, APPELL_F1_111_2_AT_03_05) < 1e-10);
}

#[test]
fn chaudhry_beta_values() {
    let v = chaudhry_beta(c(2.0), c(2.0), c(1.0), &quad()).unwrap();
    assert!(crel(v, CHAUDHRY_B_2_2_P1) < 1e-11);
    let v = chaudhry_beta(c(3.0), c(4.0), c(1.0), &quad()).unwrap();
    assert!(crel(v, CHAUDHRY_B_3_4_P1) < 1e-11);
    assert!(rel(oracle::chaudhry_beta(3.0, 4.0, 1.0, 100_000), CHAUDHRY_B_3_4_P1) < 1e-11);
    // the extended Beta at ν = 0 is Chaudhry's function
    let ext = ExtensionParams::real(1.0, 0.0).unwrap();
    let v = extended_beta(c(2.0), c(2.0), &ext, &quad()).unwrap();
    assert!(crel(v, CHAUDHRY_B_2_2_P1) < 1e-11);
}

#[test]
fn extended_beta_value() {
    let ext = ExtensionParams::real(1.0, 1.0).unwrap();
    let v = extended_beta(c(2.0), c(3.0), &ext, &quad()).unwrap();
    assert!(crel(v, EXTENDED_B_2_3_P1_NU1) < 1e-11);
    assert!(rel(oracle::extended_beta(2.0, 3.0, 1.0, 1.0, 20_000), EXTENDED_B_2_3_P1_NU1) < 1e-11);
}

#[test]
fn extended_beta_small_p_limit() {
    let ext = ExtensionParams::real(1e-10, 0.0).unwrap();
    let v = extended_beta(c(2.0), c(2.0), &ext, &quad()).unwrap();
    assert!(crel(v, 1.0 / 6.0) < 1e-5);
}

#[test]
fn extended_appell_value_all_routes() {
    let inp = input(AppellParams::real(1.0, 1.0, 1.0, 3.0, 0.3, 0.4), 1.0, 0.5);
    let m = EvaluationMethod::default();
    assert!(crel(f1pv_series(&inp, &m).unwrap(), F1PV_111_3_AT_03_04_P1_NU05) < 1e-11);
    assert!(crel(f1pv_integral(&inp, &m).unwrap(), F1PV_111_3_AT_03_04_P1_NU05) < 1e-11);
    let sum = oracle::f1pv_double_sum(&inp.appell, 1.0, 0.5, 120, 8000).unwrap();
    assert!(crel(sum, F1PV_111_3_AT_03_04_P1_NU05) < 1e-11);
}

#[test]
fn extended_appell_small_p_tends_to_classical() {
    let a = AppellParams::real(1.0, 1.0, 1.0, 3.0, 0.3, 0.4);
    let v = f1pv(&input(a, 1e-8, 0.0), &EvaluationMethod::default()).unwrap();
    let classical = appell_f1_series(&a, &SeriesControl::default()).unwrap();
    assert!((v - classical).norm() / classical.norm() < 1e-4);
}

#[test]
fn kernel_mellin_at_one_is_root_half_pi() {
    let closed = kernel_mellin_closed(0.0, c(1.0)).unwrap();
    assert!(crel(closed, (PI / 2.0).sqrt()) < 1e-15);
    let numeric = kernel_mellin_numeric(0.0, c(1.0), &quad()).unwrap();
    assert!(crel(numeric, (PI / 2.0).sqrt()) < 1e-9);
}

#[test]
fn mellin_transform_value() {
    let a = AppellParams::real(1.0, 1.0, 1.0, 3.0, 0.3, 0.4);
    let pt = MellinPoint::new(c(1.5), 0.5, &a).unwrap();
    let m = appell_core::mellin::default_method();
    let closed = mellin_forward_closed(&a, 0.5, &pt, MellinClosedForm::Corrected, &m).unwrap();
    assert!(crel(closed, MELLIN_111_3_AT_03_04_NU05_S15) < 1e-13);
    let numeric = mellin_forward_numeric(&a, 0.5, &pt, &m).unwrap();
    assert!(crel(numeric, MELLIN_111_3_AT_03_04_NU05_S15) < 1e-8);
    let printed = mellin_forward_closed(&a, 0.5, &pt, MellinClosedForm::AsPrinted, &m).unwrap();
    assert!(crel(printed, MELLIN_111_3_AT_03_04_NU05_S15) > 1e-2);
}

#[test]
fn inverse_mellin_reconstructs_value() {
    let a = AppellParams::real(1.0, 1.0, 1.0, 3.0, 0.3, 0.4);
    let m = appell_core::mellin::default_method();
    let contour = InversionContour::new(1.5, 0.5).unwrap();
    let r = mellin_inverse_numeric(&a, 0.5, 1.0, &contour, MellinClosedForm::Corrected, &m).unwrap();
    assert!(crel(r.value, F1PV_111_3_AT_03_04_P1_NU05) < 1e-5);
    assert!(r.decay_rate > 0.0);
}
