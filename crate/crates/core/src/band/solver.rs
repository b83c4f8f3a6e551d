//! Root-finding for the coupled predictor values `p1 > p2` that share one
//! band edge, and band curves built from them.

use serde::Serialize;

use super::equation::{f_function, g_function};
use super::roots::brent;
use crate::error::{invalid, Error, Result};
use crate::ou::{cost_ratio, CostParams, OuParams};

/// Default residual tolerance on `G - 2 * cost_ratio`.
pub const DEFAULT_TOL: f64 = 1e-10;
/// Largest dimensionless gap `q1 - q2` the bracket search will try.
pub const BRACKET_CAP: f64 = 1e6;
const SCAN_POINTS: usize = 8;
const MAX_ITER: usize = 300;

/// Two predictor values `p2 < p1` with `l(p1) = u(p2) = edge`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EdgePair {
    pub p1: f64,
    pub p2: f64,
    pub edge: f64,
    /// `eps |p| > gamma` at the query point: the continuous-time band is
    /// known to be inaccurate there.
    pub discrete_regime: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BandPoint {
    pub p: f64,
    pub lower: f64,
    pub upper: f64,
    pub discrete_regime: bool,
}

impl BandPoint {
    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BandCurve {
    pub points: Vec<BandPoint>,
    pub params: OuParams,
    pub costs: CostParams,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Side {
    /// `q` is `q1`; search `q2 = q1 - d`.
    Lower,
    /// `q` is `q2`; search `q1 = q2 + d`.
    Upper,
}

fn residual(q: f64, d: f64, target: f64, side: Side) -> Result<f64> {
    let g = match side {
        Side::Lower => g_function(q, q - d)?,
        Side::Upper => g_function(q + d, q)?,
    };
    if g.is_nan() {
        return Err(invalid(format!("band equation is NaN at q = {q}, gap = {d}")));
    }
    Ok(g - target)
}

fn default_gap(q: f64, target: f64, side: Side) -> f64 {
    let q_eff = match side {
        Side::Lower => q,
        Side::Upper => -q,
    };
    let cube = (6.0 * target).cbrt();
    if q_eff > 0.0 {
        cube.min((2.0 * target * q_eff).sqrt()).max(f64::MIN_POSITIVE)
    } else {
        cube.max(target)
    }
}

/// Solves for the gap `d > 0` with `G = target`.
fn solve_gap(q: f64, target: f64, side: Side, guess: Option<f64>, tol: f64) -> Result<f64> {
    let phi = |d: f64| residual(q, d, target, side);
    let start = guess
        .filter(|g| g.is_finite() && *g > 0.0)
        .unwrap_or_else(|| default_gap(q, target, side))
        .min(BRACKET_CAP);
    let (mut lo, mut hi) = (start, start);
    let mut f_hi = phi(hi)?;
    let mut f_lo = f_hi;
    if f_hi < 0.0 {
        while f_hi < 0.0 {
            if hi >= BRACKET_CAP {
                return Err(Error::NoBracket {
                    from: q,
                    span: BRACKET_CAP,
                });
            }
            lo = hi;
            f_lo = f_hi;
            hi = (hi * 2.0).min(BRACKET_CAP);
            f_hi = phi(hi)?;
        }
    } else {
        while f_lo >= 0.0 {
            if f_lo == 0.0 {
                return Ok(lo);
            }
            hi = lo;
            f_hi = f_lo;
            lo *= 0.5;
            if lo < 1e-150 {
                return Err(Error::NoBracket { from: q, span: lo });
            }
            f_lo = phi(lo)?;
        }
    }
    let mut changes = 0;
    let mut prev = f_lo;
    for k in 1..=SCAN_POINTS + 1 {
        let v = if k == SCAN_POINTS + 1 {
            f_hi
        } else {
            phi(lo + (hi - lo) * k as f64 / (SCAN_POINTS + 1) as f64)?
        };
        if (v >= 0.0) != (prev >= 0.0) {
            changes += 1;
        }
        prev = v;
    }
    if changes > 1 {
        let (a, b) = match side {
            Side::Lower => (q - hi, q - lo),
            Side::Upper => (q + lo, q + hi),
        };
        return Err(Error::MultipleRoots { lo: a, hi: b });
    }
    let mut failure = None;
    let (d, fd, iterations) = brent(
        |d| match phi(d) {
            Ok(v) => v,
            Err(e) => {
                failure = Some(e);
                f64::NAN
            }
        },
        lo,
        hi,
        f_lo,
        f_hi,
        4.0 * f64::EPSILON * hi,
        MAX_ITER,
    );
    if let Some(e) = failure {
        return Err(e);
    }
    if !(fd.abs() <= tol) {
        return Err(Error::ToleranceNotReached {
            iterations,
            residual: fd.abs(),
        });
    }
    Ok(d)
}

fn check_inputs(p: f64, tol: f64) -> Result<()> {
    if !p.is_finite() {
        return Err(invalid(format!("predictor value must be finite, got {p}")));
    }
    if !(tol > 0.0) {
        return Err(invalid(format!("tolerance must be positive, got {tol}")));
    }
    Ok(())
}

fn discrete(p: f64, params: &OuParams, costs: &CostParams) -> bool {
    params.epsilon() * p.abs() > costs.gamma()
}

/// Lower edge at `p1`: finds `p2 < p1` with `G(q1, q2) = 2 * cost_ratio`.
pub fn solve_p2(p1: f64, params: &OuParams, costs: &CostParams, tol: f64) -> Result<EdgePair> {
    solve_p2_warm(p1, params, costs, tol, None)
}

/// [`solve_p2`] started from a dimensionless gap `q1 - q2`, typically the
/// solution at a neighbouring predictor value.
pub fn solve_p2_warm(
    p1: f64,
    params: &OuParams,
    costs: &CostParams,
    tol: f64,
    gap: Option<f64>,
) -> Result<EdgePair> {
    check_inputs(p1, tol)?;
    let flag = discrete(p1, params, costs);
    if costs.gamma() == 0.0 {
        return Ok(EdgePair {
            p1,
            p2: p1,
            edge: p1,
            discrete_regime: flag,
        });
    }
    let s = params.scale();
    let q1 = p1 / s;
    let d = solve_gap(q1, 2.0 * cost_ratio(params, costs), Side::Lower, gap, tol)?;
    let q2 = q1 - d;
    Ok(EdgePair {
        p1,
        p2: q2 * s,
        edge: (f_function(q1, q2)? * s).min(p1),
        discrete_regime: flag,
    })
}

/// Upper edge at `p2`: finds `p1 > p2` with `G(q1, q2) = 2 * cost_ratio`.
pub fn solve_p1(p2: f64, params: &OuParams, costs: &CostParams, tol: f64) -> Result<EdgePair> {
    solve_p1_warm(p2, params, costs, tol, None)
}

pub fn solve_p1_warm(
    p2: f64,
    params: &OuParams,
    costs: &CostParams,
    tol: f64,
    gap: Option<f64>,
) -> Result<EdgePair> {
    check_inputs(p2, tol)?;
    let flag = discrete(p2, params, costs);
    if costs.gamma() == 0.0 {
        return Ok(EdgePair {
            p1: p2,
            p2,
            edge: p2,
            discrete_regime: flag,
        });
    }
    let s = params.scale();
    let q2 = p2 / s;
    let d = solve_gap(q2, 2.0 * cost_ratio(params, costs), Side::Upper, gap, tol)?;
    let q1 = q2 + d;
    Ok(EdgePair {
        p1: q1 * s,
        p2,
        edge: (f_function(q1, q2)? * s).max(p2),
        discrete_regime: flag,
    })
}

/// Both edges at one predictor value.
pub fn band_at(p: f64, params: &OuParams, costs: &CostParams, tol: f64) -> Result<BandPoint> {
    let lower = solve_p2(p, params, costs, tol)?;
    let upper = if p == 0.0 {
        -lower.edge
    } else {
        solve_p1(p, params, costs, tol)?.edge
    };
    Ok(BandPoint {
        p,
        lower: lower.edge,
        upper,
        discrete_regime: lower.discrete_regime,
    })
}

/// Band edges over a strictly increasing grid, warm-starting each solve from
/// its neighbour. At `p = 0` the upper edge is the mirror of the lower one.
pub fn band_curve(
    p_grid: &[f64],
    params: &OuParams,
    costs: &CostParams,
    tol: f64,
) -> Result<BandCurve> {
    if p_grid.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::Grid("predictor grid must be strictly increasing".into()));
    }
    let s = params.scale();
    let mut lower_gap = None;
    let mut upper_gap = None;
    let mut points = Vec::with_capacity(p_grid.len());
    for &p in p_grid {
        let at = |source: Error| Error::AtGridPoint {
            p,
            source: Box::new(source),
        };
        let lo = solve_p2_warm(p, params, costs, tol, lower_gap).map_err(at)?;
        lower_gap = Some((lo.p1 - lo.p2) / s);
        let upper = if p == 0.0 {
            -lo.edge
        } else {
            let up = solve_p1_warm(p, params, costs, tol, upper_gap).map_err(at)?;
            upper_gap = Some((up.p1 - up.p2) / s);
            up.edge
        };
        points.push(BandPoint {
            p,
            lower: lo.edge,
            upper,
            discrete_regime: lo.discrete_regime,
        });
    }
    Ok(BandCurve {
        points,
        params: *params,
        costs: *costs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ou::stationary_std;

    fn setup(ratio: f64) -> (OuParams, CostParams) {
        let ou = OuParams::new(0.01, 0.01).unwrap();
        let c = CostParams::from_ratio(&ou, ratio).unwrap();
        (ou, c)
    }

    #[test]
    fn zero_cost_is_degenerate() {
        let (ou, _) = setup(0.1);
        let c = CostParams::new(0.0).unwrap();
        let e = solve_p2(0.01, &ou, &c, DEFAULT_TOL).unwrap();
        assert_eq!((e.p1, e.p2, e.edge), (0.01, 0.01, 0.01));
    }

    #[test]
    fn tiny_cost_band_closes_on_predictor() {
        let (ou, c) = setup(1e-9);
        let e = solve_p2(0.01, &ou, &c, DEFAULT_TOL).unwrap();
        assert!((e.p1 - e.p2).abs() < 1e-2 * stationary_std(&ou));
        assert!((e.edge - 0.01).abs() < 1e-2 * stationary_std(&ou));
    }

    #[test]
    fn cube_root_at_origin() {
        let (ou, c) = setup(1e-4);
        let e = solve_p2(0.0, &ou, &c, DEFAULT_TOL).unwrap();
        let law = (1.5 * c.gamma() * 1e-4).cbrt();
        assert!((-e.edge / law - 1.0).abs() < 0.03);
        let u = solve_p1(0.0, &ou, &c, DEFAULT_TOL).unwrap();
        assert!((u.edge + e.edge).abs() < 1e-12);
    }

    #[test]
    fn duality_round_trip() {
        let (ou, c) = setup(0.3);
        let sigma = stationary_std(&ou);
        for k in -4..=4 {
            let x = k as f64 * sigma;
            let lo = solve_p2(x, &ou, &c, DEFAULT_TOL).unwrap();
            let back = solve_p1(lo.p2, &ou, &c, DEFAULT_TOL).unwrap();
            assert!((back.p1 - x).abs() < 1e-8 * ou.scale(), "{x} -> {}", back.p1);
            assert!((back.edge - lo.edge).abs() < 1e-8 * ou.scale());
        }
    }

    #[test]
    fn curve_is_odd_and_contains_predictor() {
        let (ou, c) = setup(0.1);
        let sigma = stationary_std(&ou);
        let grid: Vec<f64> = (-8..=8).map(|k| k as f64 * 0.5 * sigma).collect();
        let curve = band_curve(&grid, &ou, &c, DEFAULT_TOL).unwrap();
        let n = curve.points.len();
        for (i, pt) in curve.points.iter().enumerate() {
            assert!(pt.lower <= pt.p && pt.p <= pt.upper);
            let mirror = curve.points[n - 1 - i];
            assert!((pt.lower + mirror.upper).abs() < 1e-9 * ou.scale());
        }
    }

    #[test]
    fn rejects_unsorted_grid() {
        let (ou, c) = setup(0.1);
        assert!(matches!(
            band_curve(&[0.0, 0.0], &ou, &c, DEFAULT_TOL),
            Err(Error::Grid(_))
        ));
    }

    #[test]
    fn flags_discrete_regime() {
        let ou = OuParams::new(0.5, 0.2).unwrap();
        let c = CostParams::new(0.2).unwrap();
        assert!(solve_p2(1.0, &ou, &c, DEFAULT_TOL).unwrap().discrete_regime);
        assert!(!solve_p2(0.1, &ou, &c, DEFAULT_TOL).unwrap().discrete_regime);
    }
}
