//! The dimensionless band equation `G(q1, q2) = 2 * cost_ratio` and the edge
//! map `F(q1, q2)`, for `q2 <= q1`.

use crate::error::{Error, Result};
use crate::special::quad::gk15;
use crate::special::{dawson, dawson_integral_between, erfcx, int_exp_minus_scaled, LogScaled, SQRT_PI};
use crate::special::CANCELLATION_THRESHOLD;

/// Value of `G` together with a flag raised when `e^{-q1^2} - e^{-q2^2}`
/// cancels to within [`CANCELLATION_THRESHOLD`], i.e. the band is symmetric
/// about zero to working precision and the factored branch was needed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GValue {
    pub value: f64,
    pub symmetric_branch: bool,
}

fn check_order(q1: f64, q2: f64) -> Result<()> {
    if !q1.is_finite() || !q2.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "band equation needs finite arguments, got ({q1}, {q2})"
        )));
    }
    if q2 > q1 {
        return Err(Error::ReversedInterval {
            lower: q2,
            upper: q1,
        });
    }
    Ok(())
}

/// `e^{-q1^2} - e^{-q2^2}`, with the smaller exponent factored out and the
/// difference of squares taken as `(q2 - q1)(q2 + q1)`, so `q2 = -q1` gives
/// exact zero.
fn gaussian_difference(q1: f64, q2: f64) -> (LogScaled, bool) {
    let delta = (q2 - q1) * (q2 + q1);
    let cancelled = delta.abs() < CANCELLATION_THRESHOLD;
    let v = if delta > 0.0 {
        LogScaled::from_f64(-(-delta).exp_m1()).mul_exp(-q1 * q1)
    } else if delta < 0.0 {
        LogScaled::from_f64(delta.exp_m1()).mul_exp(-q2 * q2)
    } else {
        LogScaled::ZERO
    };
    (v, cancelled)
}

fn edge_with_flag(q1: f64, q2: f64) -> (f64, bool) {
    let (num, cancelled) = gaussian_difference(q1, q2);
    if q2 >= 0.0 {
        return (one_sided_edge(q1, q2), cancelled);
    }
    if q1 <= 0.0 {
        return (-one_sided_edge(-q2, -q1), cancelled);
    }
    let den = int_exp_minus_scaled(q1, q2) * 2.0;
    ((num / den).to_f64(), cancelled)
}

/// `F` for `0 <= q2 < q1` with `e^{-q2^2}` cancelled by hand; going through
/// log magnitudes of order `q^2` would cost `q^2` ulps.
fn one_sided_edge(q1: f64, q2: f64) -> f64 {
    let delta = (q2 - q1) * (q2 + q1);
    let scaled = if (q1 - q2) * (q1 + 1.0) <= 2.0 {
        gk15(&|x: f64| ((q2 - x) * (q2 + x)).exp(), q2, q1).0
    } else {
        0.5 * SQRT_PI * (erfcx(q2) - delta.exp() * erfcx(q1))
    };
    -delta.exp_m1() / (2.0 * scaled)
}

/// `F(q1, q2) = (e^{-q1^2} - e^{-q2^2}) / (2 int_{q1}^{q2} e^{-x^2} dx)`, the
/// dimensionless position shared by the lower edge at `q1` and the upper
/// edge at `q2`. It is the `e^{-x^2}`-weighted mean of `x` over `[q2, q1]`.
pub fn f_function(q1: f64, q2: f64) -> Result<f64> {
    check_order(q1, q2)?;
    if q2 == q1 {
        return Err(Error::InvalidParameter(format!(
            "F needs q2 < q1 strictly, got q1 = q2 = {q1}"
        )));
    }
    Ok(edge_with_flag(q1, q2).0.clamp(q2, q1))
}

/// `G(q1, q2) = (q1 - q2) - D(q1) + D(q2) - 2 F(q1, q2) int_{q2}^{q1} D`.
pub fn g_function(q1: f64, q2: f64) -> Result<f64> {
    g_function_diagnosed(q1, q2).map(|g| g.value)
}

pub fn g_function_diagnosed(q1: f64, q2: f64) -> Result<GValue> {
    check_order(q1, q2)?;
    if q1 == q2 {
        return Ok(GValue {
            value: 0.0,
            symmetric_branch: false,
        });
    }
    let (f, symmetric_branch) = edge_with_flag(q1, q2);
    let s = dawson_integral_between(q2, q1);
    let value = (q1 - q2) - dawson(q1) + dawson(q2) - 2.0 * f * s;
    Ok(GValue {
        value,
        symmetric_branch,
    })
}
