//! Closed forms of the expected gain, risk and exit probability between the
//! two edges, and finite-difference residuals of their backward equations.

use serde::Serialize;

use super::solver::EdgePair;
use crate::error::{Error, Result};
use crate::ou::OuParams;
use crate::special::{exit_kernel, int_exp_plus, LogScaled};

/// Exit functions of the predictor started at `p` in `(p2, p1)`.
#[derive(Debug, Clone, Copy)]
pub struct ExitFunctions {
    q1: f64,
    q2: f64,
    p1: f64,
    p2: f64,
    epsilon: f64,
    scale: f64,
    i_total: LogScaled,
    k_total: LogScaled,
    k_reverse: LogScaled,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Residuals {
    pub gain: f64,
    pub risk: f64,
    pub probability: f64,
}

impl Residuals {
    pub fn max_abs(&self) -> f64 {
        self.gain.abs().max(self.risk.abs()).max(self.probability.abs())
    }
}

impl ExitFunctions {
    pub fn new(pair: &EdgePair, params: &OuParams) -> Result<Self> {
        if !(pair.p2 < pair.p1) {
            return Err(Error::ReversedInterval {
                lower: pair.p1,
                upper: pair.p2,
            });
        }
        let scale = params.scale();
        let (q1, q2) = (pair.p1 / scale, pair.p2 / scale);
        Ok(ExitFunctions {
            q1,
            q2,
            p1: pair.p1,
            p2: pair.p2,
            epsilon: params.epsilon(),
            scale,
            i_total: int_exp_plus(q1, q2)?,
            k_total: exit_kernel(q1, q2),
            k_reverse: exit_kernel(q2, q1),
        })
    }

    fn ratio(&self, p: f64) -> Result<LogScaled> {
        Ok(int_exp_plus(self.q1, p / self.scale)? / self.i_total)
    }

    /// Probability of leaving through `p2` before `p1`.
    pub fn probability(&self, p: f64) -> Result<f64> {
        Ok(self.ratio(p)?.to_f64())
    }

    /// Expected gain accumulated until exit.
    pub fn gain(&self, p: f64) -> Result<f64> {
        let prob = self.probability(p)?;
        Ok((p - self.p1 - (self.p2 - self.p1) * prob) / self.epsilon)
    }

    /// Expected exit time, the risk term up to the position factor.
    /// Anchored at the edge farther from zero, where `e^{q^2}` peaks.
    pub fn risk(&self, p: f64) -> Result<f64> {
        let q = p / self.scale;
        let v = if self.q2.abs() > self.q1.abs() {
            let ratio = int_exp_plus(self.q2, q)? / (self.i_total * -1.0);
            self.k_reverse * ratio - exit_kernel(self.q2, q)
        } else {
            self.k_total * self.ratio(p)? - exit_kernel(self.q1, q)
        };
        Ok(2.0 * v.to_f64() / self.epsilon)
    }
}

fn fourth_order<F: Fn(f64) -> Result<f64>>(f: F, p: f64, h: f64) -> Result<(f64, f64, f64)> {
    let fm2 = f(p - 2.0 * h)?;
    let fm1 = f(p - h)?;
    let f0 = f(p)?;
    let fp1 = f(p + h)?;
    let fp2 = f(p + 2.0 * h)?;
    let d1 = (-fp2 + 8.0 * fp1 - 8.0 * fm1 + fm2) / (12.0 * h);
    let d2 = (-fp2 + 16.0 * fp1 - 30.0 * f0 + 16.0 * fm1 - fm2) / (12.0 * h * h);
    Ok((f0, d1, d2))
}

/// Residuals of `beta^2/2 f'' - eps p f' = rhs` for gain (`rhs = -p`), risk
/// (`rhs = -1`) and probability (`rhs = 0`), each divided by `max(1, |rhs|)`.
pub fn kolmogorov_residuals(p: f64, pair: &EdgePair, params: &OuParams) -> Result<Residuals> {
    if !(p > pair.p2 && p < pair.p1) {
        return Err(Error::OutsideInterval {
            p,
            lo: pair.p2,
            hi: pair.p1,
        });
    }
    let ex = ExitFunctions::new(pair, params)?;
    let h = 1e-4 * (pair.p1 - pair.p2);
    let half_b2 = 0.5 * params.beta() * params.beta();
    let eps = params.epsilon();
    let lhs = |d1: f64, d2: f64| half_b2 * d2 - eps * p * d1;
    let (_, g1, g2) = fourth_order(|x| ex.gain(x), p, h)?;
    let (_, r1, r2) = fourth_order(|x| ex.risk(x), p, h)?;
    let (_, q1, q2) = fourth_order(|x| ex.probability(x), p, h)?;
    Ok(Residuals {
        gain: (lhs(g1, g2) + p) / p.abs().max(1.0),
        risk: lhs(r1, r2) + 1.0,
        probability: lhs(q1, q2),
    })
}

/// `(gain, risk, probability)` at both edges: `(G(p1), R(p1), P(p1))` then
/// the same at `p2`.
pub fn boundary_values(pair: &EdgePair, params: &OuParams) -> Result<[(f64, f64, f64); 2]> {
    let ex = ExitFunctions::new(pair, params)?;
    let at = |p: f64| -> Result<(f64, f64, f64)> {
        Ok((ex.gain(p)?, ex.risk(p)?, ex.probability(p)?))
    };
    Ok([at(pair.p1)?, at(pair.p2)?])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pair(q1: f64, q2: f64, ou: &OuParams) -> EdgePair {
        EdgePair {
            p1: q1 * ou.scale(),
            p2: q2 * ou.scale(),
            edge: 0.0,
            discrete_regime: false,
        }
    }

    #[test]
    fn boundary_conditions() {
        let ou = OuParams::new(0.01, 0.01).unwrap();
        let pr = pair(0.5, -0.5, &ou);
        let [(g1, r1, p1), (g2, r2, p2)] = boundary_values(&pr, &ou).unwrap();
        for v in [g1, r1, p1, g2, r2] {
            assert!(v.abs() < 1e-8, "{v}");
        }
        assert!((p2 - 1.0).abs() < 1e-8);
    }

    #[test]
    fn residuals_vanish_inside() {
        let ou = OuParams::new(0.01, 0.01).unwrap();
        let pr = pair(0.5, -0.5, &ou);
        for k in 1..=20 {
            let p = pr.p2 + (pr.p1 - pr.p2) * k as f64 / 21.0;
            let r = kolmogorov_residuals(p, &pr, &ou).unwrap();
            assert!(r.max_abs() < 1e-4, "{p}: {r:?}");
        }
        assert!(kolmogorov_residuals(pr.p1, &pr, &ou).is_err());
    }

    #[test]
    fn risk_stays_accurate_deep_in_one_tail() {
        let ou = OuParams::new(0.01, 0.01).unwrap();
        for (q1, q2) in [(-1.0, -5.0), (5.0, 1.0), (0.0, -4.0)] {
            let pr = pair(q1, q2, &ou);
            for k in 1..=20 {
                let p = pr.p2 + (pr.p1 - pr.p2) * k as f64 / 21.0;
                let r = kolmogorov_residuals(p, &pr, &ou).unwrap();
                assert!(r.risk.abs() < 1e-4, "({q1}, {q2}) at {p}: {r:?}");
            }
        }
    }

    #[test]
    fn probability_is_decreasing() {
        let ou = OuParams::new(0.02, 0.05).unwrap();
        let pr = pair(1.5, -0.3, &ou);
        let ex = ExitFunctions::new(&pr, &ou).unwrap();
        let mut prev = 1.0 + 1e-12;
        for k in 1..50 {
            let p = pr.p2 + (pr.p1 - pr.p2) * k as f64 / 50.0;
            let v = ex.probability(p).unwrap();
            assert!(v < prev);
            prev = v;
        }
    }
}
