//! Closed-form limits of the band.

use std::f64::consts::PI;

use crate::ou::{CostParams, OuParams};

/// Half-width at `p = 0` for small costs, `(3 gamma beta^2 / 2)^{1/3}`.
pub fn asymptotic_small_p(costs: &CostParams, params: &OuParams) -> f64 {
    (1.5 * costs.gamma() * params.beta() * params.beta()).cbrt()
}

/// `(upper, lower) = (p, p - sqrt(2 gamma eps p))` for `p >= 0`, mirrored for
/// `p < 0`. Valid for `1 << p sqrt(a)` and `eps p << gamma`.
pub fn asymptotic_large_p(p: f64, costs: &CostParams, params: &OuParams) -> (f64, f64) {
    with_gap(p, (2.0 * costs.gamma() * params.epsilon() * p.abs()).sqrt())
}

/// Same regime as [`asymptotic_large_p`], keeping the second-order term of
/// the Dawson integral in the band equation, which doubles the squared gap:
/// `lower = p - sqrt(4 gamma eps p)`.
pub fn asymptotic_large_p_refined(p: f64, costs: &CostParams, params: &OuParams) -> (f64, f64) {
    with_gap(p, (4.0 * costs.gamma() * params.epsilon() * p.abs()).sqrt())
}

fn with_gap(p: f64, gap: f64) -> (f64, f64) {
    if p >= 0.0 {
        (p, p - gap)
    } else {
        (p + gap, p)
    }
}

/// Saturated width `2 gamma` once `eps |p|` exceeds the cost.
pub fn asymptotic_discrete_band(costs: &CostParams) -> f64 {
    2.0 * costs.gamma()
}

/// Width at `p = 0` as the cost grows without bound, `2 beta / sqrt(pi eps)`.
pub fn asymptotic_large_gamma_width(params: &OuParams) -> f64 {
    2.0 * params.beta() / (PI * params.epsilon()).sqrt()
}
