//! Signed reals stored as `sign * exp(log_magnitude)`.
//!
//! The exponential-quadratic integrals of the band equations reach
//! magnitudes like `exp(q^2)` with `q` in the hundreds, far outside `f64`.
//! Products and quotients are exact in log space; sums use log-sum-exp with
//! the larger magnitude factored out.

use std::cmp::Ordering;
use std::fmt;
use std::iter::Sum;
use std::ops::{Add, Div, Mul, Neg, Sub};

/// Relative difference below which a subtraction is treated as exact
/// cancellation.
pub const CANCELLATION_THRESHOLD: f64 = 1e-13;

#[derive(Clone, Copy, PartialEq)]
pub struct LogScaled {
    sign: i8,
    log_magnitude: f64,
}

/// Result of a subtraction that reports catastrophic cancellation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Difference {
    pub value: LogScaled,
    /// Set when the operands agreed to within [`CANCELLATION_THRESHOLD`] and
    /// the value was replaced by exact zero.
    pub cancelled: bool,
}

impl LogScaled {
    pub const ZERO: LogScaled = LogScaled {
        sign: 0,
        log_magnitude: f64::NEG_INFINITY,
    };
    pub const ONE: LogScaled = LogScaled {
        sign: 1,
        log_magnitude: 0.0,
    };

    /// Builds `sign * exp(log_magnitude)`. A zero sign or a magnitude of
    /// `-inf` gives exact zero.
    pub fn from_parts(sign: i8, log_magnitude: f64) -> Self {
        assert!(!log_magnitude.is_nan(), "log magnitude is NaN");
        if sign == 0 || log_magnitude == f64::NEG_INFINITY {
            return Self::ZERO;
        }
        LogScaled {
            sign: sign.signum(),
            log_magnitude,
        }
    }

    /// `exp(x)`, never overflowing.
    pub fn exp(x: f64) -> Self {
        Self::from_parts(1, x)
    }

    pub fn from_f64(x: f64) -> Self {
        assert!(!x.is_nan(), "cannot represent NaN");
        if x == 0.0 {
            Self::ZERO
        } else {
            LogScaled {
                sign: if x > 0.0 { 1 } else { -1 },
                log_magnitude: x.abs().ln(),
            }
        }
    }

    /// Converts back to a plain real; saturates to `±inf` or `0` outside the
    /// `f64` range.
    pub fn to_f64(self) -> f64 {
        match self.sign {
            0 => 0.0,
            s => f64::from(s) * self.log_magnitude.exp(),
        }
    }

    pub fn sign(self) -> i8 {
        self.sign
    }

    /// Natural log of the magnitude; `-inf` for zero.
    pub fn log_magnitude(self) -> f64 {
        if self.sign == 0 {
            f64::NEG_INFINITY
        } else {
            self.log_magnitude
        }
    }

    pub fn is_zero(self) -> bool {
        self.sign == 0
    }

    pub fn abs(self) -> Self {
        LogScaled {
            sign: self.sign.abs(),
            log_magnitude: self.log_magnitude,
        }
    }

    pub fn recip(self) -> Self {
        LogScaled {
            sign: self.sign,
            log_magnitude: if self.sign == 0 {
                f64::INFINITY
            } else {
                -self.log_magnitude
            },
        }
    }

    /// Multiplies by `exp(x)`.
    pub fn mul_exp(self, x: f64) -> Self {
        if self.sign == 0 {
            self
        } else {
            Self::from_parts(self.sign, self.log_magnitude + x)
        }
    }

    /// Subtraction that flags near-total cancellation instead of returning
    /// digits of noise.
    pub fn sub_flagged(self, rhs: LogScaled) -> Difference {
        self.add_flagged(-rhs)
    }

    fn add_flagged(self, rhs: LogScaled) -> Difference {
        if rhs.sign == 0 {
            return Difference {
                value: self,
                cancelled: false,
            };
        }
        if self.sign == 0 {
            return Difference {
                value: rhs,
                cancelled: false,
            };
        }
        let (big, small) = if self.log_magnitude >= rhs.log_magnitude {
            (self, rhs)
        } else {
            (rhs, self)
        };
        let delta = small.log_magnitude - big.log_magnitude;
        if big.sign == small.sign {
            return Difference {
                value: LogScaled {
                    sign: big.sign,
                    log_magnitude: big.log_magnitude + delta.exp().ln_1p(),
                },
                cancelled: false,
            };
        }
        // 1 - exp(delta) with delta <= 0
        let rel = -delta.exp_m1();
        if rel < CANCELLATION_THRESHOLD {
            return Difference {
                value: Self::ZERO,
                cancelled: true,
            };
        }
        Difference {
            value: LogScaled {
                sign: big.sign,
                log_magnitude: big.log_magnitude + rel.ln(),
            },
            cancelled: false,
        }
    }
}

impl Default for LogScaled {
    fn default() -> Self {
        Self::ZERO
    }
}

impl fmt::Debug for LogScaled {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.sign {
            0 => write!(f, "LogScaled(0)"),
            s => write!(
                f,
                "LogScaled({}exp({}))",
                if s < 0 { "-" } else { "" },
                self.log_magnitude
            ),
        }
    }
}

impl From<f64> for LogScaled {
    fn from(x: f64) -> Self {
        Self::from_f64(x)
    }
}

impl Neg for LogScaled {
    type Output = LogScaled;
    fn neg(self) -> LogScaled {
        LogScaled {
            sign: -self.sign,
            log_magnitude: self.log_magnitude,
        }
    }
}

impl Add for LogScaled {
    type Output = LogScaled;
    fn add(self, rhs: LogScaled) -> LogScaled {
        self.add_flagged(rhs).value
    }
}

impl Sub for LogScaled {
    type Output = LogScaled;
    fn sub(self, rhs: LogScaled) -> LogScaled {
        self.sub_flagged(rhs).value
    }
}

impl Mul for LogScaled {
    type Output = LogScaled;
    fn mul(self, rhs: LogScaled) -> LogScaled {
        if self.sign == 0 || rhs.sign == 0 {
            return Self::ZERO;
        }
        LogScaled {
            sign: self.sign * rhs.sign,
            log_magnitude: self.log_magnitude + rhs.log_magnitude,
        }
    }
}

impl Div for LogScaled {
    type Output = LogScaled;
    /// Division by zero yields an infinite magnitude, mirroring `f64`.
    fn div(self, rhs: LogScaled) -> LogScaled {
        self * rhs.recip()
    }
}

impl Mul<f64> for LogScaled {
    type Output = LogScaled;
    fn mul(self, rhs: f64) -> LogScaled {
        self * LogScaled::from_f64(rhs)
    }
}

impl Sum for LogScaled {
    fn sum<I: Iterator<Item = LogScaled>>(iter: I) -> LogScaled {
        iter.fold(LogScaled::ZERO, |acc, x| acc + x)
    }
}

impl PartialOrd for LogScaled {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match self.sign.cmp(&other.sign) {
            Ordering::Equal => match self.sign {
                0 => Some(Ordering::Equal),
                1 => self.log_magnitude.partial_cmp(&other.log_magnitude),
                _ => other.log_magnitude.partial_cmp(&self.log_magnitude),
            },
            ord => Some(ord),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_is_absorbing_and_neutral() {
        let x = LogScaled::from_f64(3.5);
        assert_eq!((x * LogScaled::ZERO).to_f64(), 0.0);
        assert_eq!((x + LogScaled::ZERO).to_f64(), 3.5);
        assert_eq!((LogScaled::ZERO - x).to_f64(), -3.5);
        assert!(LogScaled::ZERO.is_zero());
        assert_eq!(LogScaled::from_parts(0, 12.0), LogScaled::ZERO);
    }

    #[test]
    fn round_trip_below_700() {
        for &x in &[1e-300, -2.5e-7, 1.0, -42.0, 6.02e23, -1e300] {
            let back = LogScaled::from_f64(x).to_f64();
            assert!(((back - x) / x).abs() < 1e-13, "{x} -> {back}");
        }
    }

    #[test]
    fn huge_magnitudes_add_without_overflow() {
        let a = LogScaled::exp(1e6);
        let b = LogScaled::exp(1e6 - 2.0_f64.ln());
        let s = a + b;
        assert!((s.log_magnitude() - (1e6 + 1.5_f64.ln())).abs() < 1e-9);
        let d = a - b;
        assert!((d.log_magnitude() - (1e6 + 0.5_f64.ln())).abs() < 1e-9);
        assert_eq!(d.sign(), 1);
        let tiny = LogScaled::exp(-1e6) * LogScaled::exp(-1e6);
        assert_eq!(tiny.log_magnitude(), -2e6);
    }

    #[test]
    fn near_equal_subtraction_is_flagged() {
        let a = LogScaled::exp(900.0);
        let b = LogScaled::exp(900.0 + 1e-15);
        let d = a.sub_flagged(b);
        assert!(d.cancelled);
        assert!(d.value.is_zero());
        let ok = LogScaled::from_f64(1.0).sub_flagged(LogScaled::from_f64(1.0 - 1e-10));
        assert!(!ok.cancelled);
        assert!((ok.value.to_f64() - 1e-10).abs() < 1e-16);
    }

    #[test]
    fn ordering_follows_value() {
        let vals = [-1e300, -2.0, -0.5, 0.0, 1e-200, 3.0, 7e200];
        for w in vals.windows(2) {
            assert!(LogScaled::from_f64(w[0]) < LogScaled::from_f64(w[1]));
        }
        assert!(LogScaled::exp(-800.0) > LogScaled::ZERO);
        assert!(-LogScaled::exp(800.0) < -LogScaled::exp(700.0));
    }

    #[test]
    fn division_and_products() {
        let x = LogScaled::from_f64(-6.0) / LogScaled::from_f64(4.0);
        assert!((x.to_f64() + 1.5).abs() < 1e-15);
        assert!(((LogScaled::from_f64(2.0) * -3.0).to_f64() + 6.0).abs() < 1e-14);
        assert_eq!(LogScaled::from_f64(2.0).mul_exp(3.0).log_magnitude(), 2.0_f64.ln() + 3.0);
    }
}
