//! Discrete Ornstein-Uhlenbeck predictor `p_{t+1} = (1 - eps) p_t + beta xi_t`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OuParams {
    epsilon: f64,
    beta: f64,
}

impl OuParams {
    /// Mean-reversion rate in `(0, 1]` and noise scale `beta > 0`.
    pub fn new(epsilon: f64, beta: f64) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon <= 1.0) {
            return Err(invalid(format!("epsilon must lie in (0, 1], got {epsilon}")));
        }
        if !(beta > 0.0 && beta.is_finite()) {
            return Err(invalid(format!("beta must be positive and finite, got {beta}")));
        }
        Ok(OuParams { epsilon, beta })
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// `a = eps / beta^2`, the inverse squared length scale of the band equations.
    pub fn a(&self) -> f64 {
        self.epsilon / (self.beta * self.beta)
    }

    /// Predictor units per dimensionless unit, `beta / sqrt(eps)`.
    pub fn scale(&self) -> f64 {
        self.beta / self.epsilon.sqrt()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CostParams {
    gamma: f64,
}

impl CostParams {
    pub fn new(gamma: f64) -> Result<Self> {
        if !(gamma >= 0.0 && gamma.is_finite()) {
            return Err(invalid(format!("gamma must be finite and >= 0, got {gamma}")));
        }
        Ok(CostParams { gamma })
    }

    /// The cost whose dimensionless ratio `gamma eps^{3/2} / beta` equals `ratio`.
    pub fn from_ratio(params: &OuParams, ratio: f64) -> Result<Self> {
        Self::new(ratio * params.beta / params.epsilon.powf(1.5))
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }
}

/// A sampled predictor path `p_0 .. p_{T}`.
#[derive(Debug, Clone, PartialEq)]
pub struct PredictorPath {
    pub values: Vec<f64>,
    pub seed: u64,
}

pub fn step(p: f64, params: &OuParams, xi: f64) -> f64 {
    p * (1.0 - params.epsilon) + params.beta * xi
}

/// Generator used for every simulated path: ChaCha8 seeded with `seed`, on
/// stream `index`. Paths are reproducible across platforms given both.
pub fn path_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Draws one standard normal variate.
pub fn normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.sample(StandardNormal)
}

/// `length` values starting at `p0`, with normals from `path_rng(seed, 0)`.
pub fn sample_path(params: &OuParams, p0: f64, length: usize, seed: u64) -> Result<PredictorPath> {
    if length == 0 {
        return Err(invalid("path length must be at least 1"));
    }
    let mut rng = path_rng(seed, 0);
    let mut values = Vec::with_capacity(length);
    let mut p = p0;
    values.push(p);
    for _ in 1..length {
        p = step(p, params, normal(&mut rng));
        values.push(p);
    }
    Ok(PredictorPath { values, seed })
}

/// Exact stationary standard deviation of the discrete recurrence,
/// `beta / sqrt(eps (2 - eps))`.
pub fn stationary_std(params: &OuParams) -> f64 {
    params.beta / (params.epsilon * (2.0 - params.epsilon)).sqrt()
}

/// Continuous-time stationary deviation `beta / sqrt(2 eps)`, the unit in
/// which band curves are universal.
pub fn continuous_std(params: &OuParams) -> f64 {
    params.scale() * std::f64::consts::FRAC_1_SQRT_2
}

/// `q = p sqrt(a) = p sqrt(eps) / beta`.
pub fn to_dimensionless(p: f64, params: &OuParams) -> f64 {
    p / params.scale()
}

pub fn from_dimensionless(q: f64, params: &OuParams) -> f64 {
    q * params.scale()
}

/// `gamma eps^{3/2} / beta`, the one cost parameter the band depends on.
pub fn cost_ratio(params: &OuParams, costs: &CostParams) -> f64 {
    costs.gamma * params.epsilon.powf(1.5) / params.beta
}
