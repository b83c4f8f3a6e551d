use thiserror::Error;

/// Errors raised by the band solver, the simulator and the DP oracle.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("interval bounds out of order: {lower} > {upper}")]
    ReversedInterval { lower: f64, upper: f64 },

    #[error("zero-cost degenerate band: the band collapses onto the predictor when gamma = 0")]
    ZeroCost,

    #[error("band equation has no sign change within {span:e} of q = {from}")]
    NoBracket { from: f64, span: f64 },

    #[error("band equation has several roots between q = {lo} and q = {hi}")]
    MultipleRoots { lo: f64, hi: f64 },

    #[error("root finder stopped after {iterations} iterations with residual {residual:e}")]
    ToleranceNotReached { iterations: usize, residual: f64 },

    #[error("p = {p} lies outside the open interval ({lo}, {hi})")]
    OutsideInterval { p: f64, lo: f64, hi: f64 },

    #[error("solver failed at p = {p}: {source}")]
    AtGridPoint { p: f64, source: Box<Error> },

    #[error("p = {p} is more than one grid spacing outside the band table [{lo}, {hi}]")]
    Extrapolation { p: f64, lo: f64, hi: f64 },

    #[error("invalid grid: {0}")]
    Grid(String),

    #[error("no-trade boundaries still moving after {horizon} backward-induction steps")]
    NotConverged { horizon: usize },

    #[error("no-trade set at p = {p} is not contiguous")]
    NonContiguous { p: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
