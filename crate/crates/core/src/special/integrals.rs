//! The exponential-quadratic integrals `int e^{x^2}`, `int e^{-x^2}` and the
//! triangle integral `K`, in dimensionless variables.

use super::dawson::{dawson, dawson_integral_between};
use super::erf::erfcx;
use super::quad::{gk15, integrate_log};
use super::LogScaled;
use crate::error::{invalid, Error, Result};

const SQRT_PI_2: f64 = 0.886_226_925_452_758_013_649_083_741_671;

/// `int_0^q e^{x^2} dx = e^{q^2} D(q)` in log space.
pub(crate) fn exp_sq_dawson(q: f64) -> LogScaled {
    let d = dawson(q);
    if d == 0.0 {
        return LogScaled::ZERO;
    }
    LogScaled::from_f64(d).mul_exp(q * q)
}

/// `(hi - lo)` is short relative to the local scale of `e^{±x^2}`, where the
/// Dawson difference would cancel.
fn is_short(lo: f64, hi: f64) -> bool {
    (hi - lo).abs() * (lo.abs().max(hi.abs()) + 1.0) <= 2.0
}

/// `int_{q_lo}^{q_hi} e^{x^2} dx`. Bounds must be finite.
pub fn int_exp_plus(q_lo: f64, q_hi: f64) -> Result<LogScaled> {
    if !q_lo.is_finite() || !q_hi.is_finite() {
        return Err(invalid(format!(
            "int_exp_plus needs finite bounds, got ({q_lo}, {q_hi})"
        )));
    }
    if q_lo == q_hi {
        return Ok(LogScaled::ZERO);
    }
    if is_short(q_lo, q_hi) {
        let m = (q_lo * q_lo).max(q_hi * q_hi);
        let f = |x: f64| (x * x - m).exp();
        let v = gk15(&f, q_lo, q_hi).0;
        return Ok(LogScaled::from_f64(v).mul_exp(m));
    }
    Ok(exp_sq_dawson(q_hi) - exp_sq_dawson(q_lo))
}

/// `int_{q_lo}^{q_hi} e^{-x^2} dx` in log space, accepting infinite bounds.
/// Keeps relative accuracy far in the tails.
pub fn int_exp_minus_scaled(q_lo: f64, q_hi: f64) -> LogScaled {
    assert!(!q_lo.is_nan() && !q_hi.is_nan(), "NaN bound");
    if q_lo == q_hi {
        return LogScaled::ZERO;
    }
    let (lo, hi, sign) = if q_lo < q_hi {
        (q_lo, q_hi, 1.0)
    } else {
        (q_hi, q_lo, -1.0)
    };
    let v = if lo.is_finite() && hi.is_finite() && is_short(lo, hi) {
        let m = (lo * lo).min(hi * hi);
        let m = if lo < 0.0 && hi > 0.0 { 0.0 } else { m };
        let f = |x: f64| (m - x * x).exp();
        LogScaled::from_f64(gk15(&f, lo, hi).0).mul_exp(-m)
    } else if lo >= 0.0 {
        tail_difference(lo, hi)
    } else if hi <= 0.0 {
        tail_difference(-hi, -lo)
    } else {
        // straddles zero: erf(hi) + erf(-lo), both positive
        LogScaled::from_f64(SQRT_PI_2 * (2.0 - half_erfc(hi) - half_erfc(-lo)))
    };
    v * sign
}

/// `erfc(x)` for `x >= 0`, through `erfcx` so large arguments underflow
/// gracefully.
fn half_erfc(x: f64) -> f64 {
    if x == f64::INFINITY {
        0.0
    } else {
        erfcx(x) * (-x * x).exp()
    }
}

/// `int_lo^hi e^{-x^2}` for `0 <= lo < hi`, as
/// `(sqrt(pi)/2) e^{-lo^2} (erfcx(lo) - e^{lo^2 - hi^2} erfcx(hi))`.
fn tail_difference(lo: f64, hi: f64) -> LogScaled {
    let upper = if hi == f64::INFINITY {
        0.0
    } else {
        ((lo - hi) * (lo + hi)).exp() * erfcx(hi)
    };
    LogScaled::from_f64(SQRT_PI_2 * (erfcx(lo) - upper)).mul_exp(-lo * lo)
}

/// `int_{q_lo}^{q_hi} e^{-x^2} dx`; infinite bounds give the `±sqrt(pi)/2`
/// half-line limits.
pub fn int_exp_minus(q_lo: f64, q_hi: f64) -> f64 {
    int_exp_minus_scaled(q_lo, q_hi).to_f64()
}

/// `K = int int_{q2 <= x <= y <= q1} e^{x^2 - y^2} dx dy`, by log-scaled
/// quadrature of `e^{-y^2} int_{q2}^{y} e^{x^2} dx` over `y` in `[q2, q1]`.
pub fn double_integral_k(q2: f64, q1: f64) -> Result<LogScaled> {
    if !q2.is_finite() || !q1.is_finite() {
        return Err(invalid(format!("K needs finite bounds, got ({q2}, {q1})")));
    }
    if q2 > q1 {
        return Err(Error::ReversedInterval {
            lower: q2,
            upper: q1,
        });
    }
    if q2 == q1 {
        return Ok(LogScaled::ZERO);
    }
    let log_h = |y: f64| {
        let inner = int_exp_plus(q2, y).expect("finite bounds");
        inner.log_magnitude() - y * y
    };
    Ok(integrate_log(&log_h, q2, q1, 1e-13))
}

/// `M(q1, q) = int_{q1}^{q} e^{s^2} [int_{q1}^{s} e^{-t^2} dt] ds` in closed
/// form, `int_q^{q1} D - e^{q^2} D(q) int_q^{q1} e^{-t^2}`. `M(q1, q2)` equals
/// the triangle integral `K`.
pub fn exit_kernel(q1: f64, q: f64) -> LogScaled {
    let s = LogScaled::from_f64(dawson_integral_between(q, q1));
    s - exp_sq_dawson(q) * int_exp_minus_scaled(q, q1)
}

/// `sqrt(pi)`, the full-line Gaussian integral.
pub const SQRT_PI: f64 = 1.772_453_850_905_516_027_298_167_483_341;
