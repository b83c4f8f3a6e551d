use notrade_band::special::{
    dawson, dawson_integral, dawson_integral_between, double_integral_k, erf, erfc, erfcx,
    exit_kernel, int_exp_minus, int_exp_plus, SQRT_PI,
};
use proptest::prelude::*;
use quadrature::double_exponential::integrate;

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

/// Sum of double-exponential quadratures over `n` equal panels.
fn panels<F: Fn(f64) -> f64 + Copy>(f: F, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    (0..n)
        .map(|i| integrate(f, a + i as f64 * h, a + (i + 1) as f64 * h, 1e-18).integral)
        .sum()
}

/// D(x) = int_0^x e^{t^2 - x^2} dt
fn dawson_oracle(x: f64) -> f64 {
    panels(|t| (t * t - x * x).exp(), 0.0, x, (8.0 * x * x).ceil() as usize)
}

#[test]
fn erf_matches_quadrature() {
    for x in [0.1, 0.5, 0.9, 1.7, 2.5, 4.0] {
        let q = 2.0 / SQRT_PI * integrate(|t| (-t * t).exp(), 0.0, x, 1e-16).integral;
        assert!(rel(erf(x), q) < 1e-13, "erf({x})");
    }
}

#[test]
fn erfcx_matches_tail_quadrature() {
    // erfcx(x) = 2/sqrt(pi) int_0^inf e^{-s^2 - 2 x s} ds
    for x in [0.3, 1.0, 5.0, 12.0, 40.0] {
        let q = 2.0 / SQRT_PI * panels(|s| (-s * s - 2.0 * x * s).exp(), 0.0, 10.0, 400);
        assert!(rel(erfcx(x), q) < 1e-12, "erfcx({x})");
    }
}

#[test]
fn dawson_matches_quadrature() {
    for x in [0.05, 0.4, 0.92413, 1.5, 3.0, 5.9, 6.1, 9.0, 15.0] {
        assert!(rel(dawson(x), dawson_oracle(x)) < 1e-12, "D({x})");
        assert!(rel(dawson(-x), -dawson_oracle(x)) < 1e-12);
    }
}

#[test]
fn dawson_integral_matches_quadrature() {
    for (a, b) in [(0.0, 1.0), (0.3, 0.4), (-2.0, 3.5), (4.0, 11.0), (7.9, 8.3)] {
        let q = integrate(dawson, a, b, 1e-15).integral;
        assert!(rel(dawson_integral_between(a, b), q) < 1e-11, "({a}, {b})");
    }
    let q = integrate(dawson, 0.0, 6.0, 1e-15).integral;
    assert!(rel(dawson_integral(6.0), q) < 1e-11);
}

#[test]
fn exponential_integrals_match_quadrature() {
    for (a, b) in [(0.0, 0.5), (-1.0, 2.0), (2.0, 2.5), (-4.0, -3.0), (5.0, 7.0)] {
        let plus = integrate(|x| (x * x).exp(), a, b, 1e-14 * (b * b).max(a * a).exp()).integral;
        assert!(rel(int_exp_plus(a, b).unwrap().to_f64(), plus) < 1e-11, "plus ({a}, {b})");
        let minus = integrate(|x| (-x * x).exp(), a, b, 1e-20).integral;
        assert!(rel(int_exp_minus(a, b), minus) < 1e-11, "minus ({a}, {b})");
    }
}

/// K(q2, q1) as the area integral over the triangle q2 <= x <= y <= q1.
fn triangle_oracle(q2: f64, q1: f64) -> f64 {
    integrate(
        |y| integrate(|x| (x * x - y * y).exp(), q2, y, 1e-16).integral,
        q2,
        q1,
        1e-15,
    )
    .integral
}

#[test]
fn triangle_integral_matches_two_dimensional_quadrature() {
    for (q2, q1) in [(2.0, 2.5), (-1.0, 1.0), (-3.0, 0.5), (0.0, 0.1)] {
        let want = triangle_oracle(q2, q1);
        let k = double_integral_k(q2, q1).unwrap().to_f64();
        let m = exit_kernel(q1, q2).to_f64();
        assert!(rel(k, want) < 1e-9, "K({q2}, {q1}) = {k} vs {want}");
        assert!(rel(m, want) < 1e-9, "M({q1}, {q2}) = {m} vs {want}");
    }
}

proptest! {
    #[test]
    fn erf_and_erfc_sum_to_one(x in -6.0..6.0f64) {
        prop_assert!((erf(x) + erfc(x) - 1.0).abs() < 1e-15);
        prop_assert!((erf(-x) + erf(x)).abs() < 1e-16);
    }

    #[test]
    fn dawson_is_odd_and_bounded(x in -50.0..50.0f64) {
        prop_assert_eq!(dawson(-x), -dawson(x));
        prop_assert!(dawson(x).abs() <= 0.5410442246);
    }

    #[test]
    fn exp_plus_is_additive(a in -5.0..5.0f64, b in -5.0..5.0f64, c in -5.0..5.0f64) {
        let ab = int_exp_plus(a, b).unwrap().to_f64();
        let bc = int_exp_plus(b, c).unwrap().to_f64();
        let ac = int_exp_plus(a, c).unwrap().to_f64();
        let scale = (a * a).max(b * b).max(c * c).exp();
        prop_assert!((ab + bc - ac).abs() <= 1e-12 * scale);
    }

    #[test]
    fn triangle_integral_is_positive(q2 in -8.0..8.0f64, w in 0.01..6.0f64) {
        let k = exit_kernel(q2 + w, q2);
        prop_assert!(k.to_f64() > 0.0 || k.log_magnitude() > 700.0);
    }
}
