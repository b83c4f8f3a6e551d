//! Overflow-safe special functions: the Dawson function, the error function
//! family and the exponential-quadratic integrals built on them.

mod dawson;
mod erf;
mod integrals;
mod logscaled;
pub(crate) mod quad;

pub use dawson::{dawson, dawson_integral, dawson_integral_between};
pub use erf::{erf, erfc, erfcx};
pub use integrals::{
    double_integral_k, exit_kernel, int_exp_minus, int_exp_minus_scaled, int_exp_plus, SQRT_PI,
};
pub use logscaled::{Difference, LogScaled, CANCELLATION_THRESHOLD};
