//! The optimal no-trade band: the band equation, its root-finder, the
//! asymptotic regimes and the exit-function cross-checks.

mod asymptotics;
mod equation;
mod kolmogorov;
mod roots;
mod solver;

pub use asymptotics::{
    asymptotic_discrete_band, asymptotic_large_gamma_width, asymptotic_large_p,
    asymptotic_large_p_refined, asymptotic_small_p,
};
pub use equation::{f_function, g_function, g_function_diagnosed, GValue};
pub use kolmogorov::{boundary_values, kolmogorov_residuals, ExitFunctions, Residuals};
pub use solver::{
    band_at, band_curve, solve_p1, solve_p1_warm, solve_p2, solve_p2_warm, BandCurve, BandPoint,
    EdgePair, BRACKET_CAP, DEFAULT_TOL,
};
