use core::f64::consts::PI;

use ksblow_core::quad::{exp_sinh, geometric, golden_max, integrate_split, tanh_sinh, Tolerance};
use ksblow_core::special::{gamma, gamma_p, gamma_q, ln_gamma};

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

#[test]
fn incomplete_gamma_closed_forms() {
    for &x in &[1e-3, 0.1, 0.7, 1.0, 2.5, 7.0, 30.0] {
        assert!(rel(gamma_p(1.0, x), -(-x).exp_m1()) < 1e-14, "P(1,{x})");
        assert!(rel(gamma_p(0.5, x), libm::erf(x.sqrt())) < 1e-13, "P(1/2,{x})");
        let q3 = (-x).exp() * (1.0 + x + 0.5 * x * x);
        assert!(rel(gamma_q(3.0, x), q3) < 1e-12, "Q(3,{x})");
        assert!((gamma_p(2.5, x) + gamma_q(2.5, x) - 1.0).abs() < 1e-15);
    }
}

#[test]
fn incomplete_gamma_large_order_median() {
    // Median of Gamma(a) is close to a - 1/3 for large a.
    for &a in &[10.0, 50.0, 100.0] {
        let p = gamma_p(a, a - 1.0 / 3.0);
        assert!((p - 0.5).abs() < 0.01 / a, "a={a} p={p}");
    }
}

#[test]
fn log_gamma_agrees_with_gamma() {
    for &x in &[0.3, 1.5, 4.0, 12.5, 30.0] {
        assert!(rel(ln_gamma(x).exp(), gamma(x)) < 1e-13);
    }
}

#[test]
fn tanh_sinh_endpoint_singularities() {
    let tol = Tolerance::new(0.0, 1e-13);
    let v = tanh_sinh(|_, da, _| da.powf(-0.5), 0.0, 1.0, tol).unwrap().value;
    assert!(rel(v, 2.0) < 1e-12);
    let v = tanh_sinh(|_, _, db| db.ln(), 0.0, 1.0, tol).unwrap().value;
    assert!(rel(v, -1.0) < 1e-12);
    let v = tanh_sinh(|x, _, _| x.sin(), 0.0, PI, tol).unwrap().value;
    assert!(rel(v, 2.0) < 1e-13);
    // Beta(1/2,1/2) density integrates to 1 only if both ends are exact.
    let v = tanh_sinh(|_, da, db| 1.0 / (PI * (da * db).sqrt()), 0.0, 1.0, tol).unwrap().value;
    assert!(rel(v, 1.0) < 1e-12);
}

#[test]
fn exp_sinh_half_line() {
    let tol = Tolerance::new(0.0, 1e-13);
    assert!(rel(exp_sinh(|x, _| (-x).exp(), 0.0, 1.0, tol).unwrap().value, 1.0) < 1e-12);
    assert!(rel(exp_sinh(|x, _| 1.0 / (1.0 + x * x), 0.0, 1.0, tol).unwrap().value, PI / 2.0) < 1e-12);
    let v = exp_sinh(|x, _| x.powf(2.5) * (-x).exp(), 0.0, 3.0, tol).unwrap().value;
    assert!(rel(v, gamma(3.5)) < 1e-12);
    let v = integrate_split(|x| if x < 2.0 { 1.0 } else { (2.0 - x).exp() }, 0.0, &[2.0], tol).unwrap();
    assert!(rel(v, 3.0) < 1e-12);
}

#[test]
fn golden_section_and_grids() {
    let (x, v) = golden_max(|x| -(x - 2.0) * (x - 2.0) + 1.0, 0.0, 5.0, 1e-10);
    assert!((x - 2.0).abs() < 1e-8 && (v - 1.0).abs() < 1e-15);
    let g = geometric(1e-4, 1e3, 48);
    assert_eq!(g.len(), 7 * 48 + 1);
    assert!(rel(g[0], 1e-4) < 1e-15 && rel(*g.last().unwrap(), 1e3) < 1e-13);
    let r0 = g[1] / g[0];
    assert!(g.windows(2).all(|w| rel(w[1] / w[0], r0) < 1e-12));
}
