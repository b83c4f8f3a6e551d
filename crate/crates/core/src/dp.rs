//! Brute-force Bellman oracle on a `(p, pi)` grid: backward induction of
//! the value of holding a position, the resulting no-trade zones, and checks
//! of their structure.

use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::ou::{stationary_std, CostParams, OuParams};

/// Consecutive steps with unchanged zone boundaries that end the induction.
pub const STABLE_STEPS: usize = 10;
/// Gaussian kernel weights below this fraction of the row peak are dropped
/// before renormalization.
const KERNEL_CUTOFF: f64 = 1e-18;

/// One row of the transition kernel, stored from `start`.
#[derive(Debug, Clone, PartialEq)]
struct KernelRow {
    start: usize,
    weights: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DpGrid {
    pub p_values: Vec<f64>,
    pub pi_values: Vec<f64>,
    pub dp: f64,
    pub dpi: f64,
    pub n_sigma: f64,
    pub sigma: f64,
    rows: Vec<KernelRow>,
}

impl DpGrid {
    /// Dense transition row `i`.
    pub fn transition_row(&self, i: usize) -> Vec<f64> {
        let mut row = vec![0.0; self.p_values.len()];
        let r = &self.rows[i];
        row[r.start..r.start + r.weights.len()].copy_from_slice(&r.weights);
        row
    }

    pub fn n_p(&self) -> usize {
        self.p_values.len()
    }

    pub fn n_pi(&self) -> usize {
        self.pi_values.len()
    }

    /// Index of the position node closest to `x`.
    pub fn nearest_pi(&self, x: f64) -> usize {
        let k = ((x - self.pi_values[0]) / self.dpi).round();
        k.clamp(0.0, (self.n_pi() - 1) as f64) as usize
    }
}

/// Predictor grid of `n_p` nodes over `±n_sigma` stationary deviations,
/// position grid of `n_pi` nodes over `[-pi_span, pi_span]`, and the
/// truncated, renormalized Gaussian kernel of one predictor step.
pub fn build_grid(
    params: &OuParams,
    n_sigma: f64,
    n_p: usize,
    pi_span: f64,
    n_pi: usize,
) -> Result<DpGrid> {
    if n_p < 3 || n_pi < 3 {
        return Err(Error::Grid(format!("need at least 3 nodes per axis, got {n_p} x {n_pi}")));
    }
    if !(n_sigma >= 4.0 && n_sigma.is_finite()) {
        return Err(Error::Grid(format!("n_sigma must be >= 4, got {n_sigma}")));
    }
    if !(pi_span > 0.0 && pi_span.is_finite()) {
        return Err(Error::Grid(format!("position span must be positive, got {pi_span}")));
    }
    let sigma = stationary_std(params);
    let half = n_sigma * sigma;
    let dp = 2.0 * half / (n_p - 1) as f64;
    let beta = params.beta();
    if beta < dp {
        return Err(Error::Grid(format!(
            "predictor spacing {dp:e} exceeds the step noise {beta:e}; refine n_p"
        )));
    }
    let p_values: Vec<f64> = (0..n_p).map(|i| -half + dp * i as f64).collect();
    let dpi = 2.0 * pi_span / (n_pi - 1) as f64;
    let pi_values: Vec<f64> = (0..n_pi).map(|k| -pi_span + dpi * k as f64).collect();
    let decay = 1.0 - params.epsilon();
    let rows = p_values
        .iter()
        .map(|&p| {
            let mean = decay * p;
            let w: Vec<f64> = p_values
                .iter()
                .map(|&x| (-0.5 * ((x - mean) / beta).powi(2)).exp())
                .collect();
            let peak = w.iter().cloned().fold(0.0, f64::max);
            let keep = |v: &f64| *v > KERNEL_CUTOFF * peak;
            let start = w.iter().position(keep).unwrap_or(0);
            let end = w.iter().rposition(keep).map_or(n_p, |e| e + 1);
            let total: f64 = w[start..end].iter().sum();
            KernelRow {
                start,
                weights: w[start..end].iter().map(|v| v / total).collect(),
            }
        })
        .collect();
    Ok(DpGrid {
        p_values,
        pi_values,
        dp,
        dpi,
        n_sigma,
        sigma,
        rows,
    })
}

/// `W(k) = max_j V(j) - c |j - k|` by a forward and a backward running max.
fn distance_transform(v: &[f64], c: f64, out: &mut [f64]) {
    out.copy_from_slice(v);
    for k in 1..out.len() {
        out[k] = out[k].max(out[k - 1] - c);
    }
    for k in (0..out.len() - 1).rev() {
        out[k] = out[k].max(out[k + 1] - c);
    }
}

/// Optimal target index from every start index for one row of `V`, staying
/// put unless a move gains more than a rounding margin.
fn policy_row(v: &[f64], c: f64) -> Vec<usize> {
    let n = v.len();
    let scale = v.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
    let margin = 1e-12 * (scale + c);
    let mut fwd = vec![0usize; n];
    let mut best = 0usize;
    for k in 0..n {
        let carried = v[best] - c * (k - best) as f64;
        if k == 0 || v[k] + margin >= carried {
            best = k;
        }
        fwd[k] = best;
    }
    let mut bwd = vec![0usize; n];
    let mut best = n - 1;
    for k in (0..n).rev() {
        let carried = v[best] - c * (best - k) as f64;
        if k == n - 1 || v[k] + margin >= carried {
            best = k;
        }
        bwd[k] = best;
    }
    (0..n)
        .map(|k| {
            let gain = |j: usize| v[j] - c * j.abs_diff(k) as f64;
            let (a, b) = (fwd[k], bwd[k]);
            if a == k && b == k {
                k
            } else if a == k {
                if gain(b) > v[k] + margin {
                    b
                } else {
                    k
                }
            } else if b == k {
                if gain(a) > v[k] + margin {
                    a
                } else {
                    k
                }
            } else if gain(a) >= gain(b) {
                a
            } else {
                b
            }
        })
        .collect()
}

/// Value of holding each position, optimal trades and no-trade zones at the
/// final induction step.
#[derive(Debug, Clone, PartialEq)]
pub struct DpSolution {
    pub grid: DpGrid,
    pub gamma: f64,
    /// Induction steps performed.
    pub horizon: usize,
    value: Vec<f64>,
}

impl DpSolution {
    /// `V(pi_k, p_i)`.
    pub fn value(&self, i: usize, k: usize) -> f64 {
        self.value[i * self.grid.n_pi() + k]
    }

    pub fn value_row(&self, i: usize) -> &[f64] {
        let n = self.grid.n_pi();
        &self.value[i * n..(i + 1) * n]
    }

    /// Mutable access to the value table, row-major in `p`.
    pub fn value_mut(&mut self) -> &mut [f64] {
        &mut self.value
    }

    fn penalty(&self) -> f64 {
        self.gamma * self.grid.dpi
    }

    /// Target position index for every starting index at predictor row `i`.
    pub fn policy(&self, i: usize) -> Vec<usize> {
        policy_row(self.value_row(i), self.penalty())
    }
}

fn zone_bounds(v: &[f64], c: f64) -> (usize, usize) {
    let pol = policy_row(v, c);
    let first = (0..pol.len()).find(|&k| pol[k] == k).unwrap_or(0);
    let last = (0..pol.len()).rev().find(|&k| pol[k] == k).unwrap_or(0);
    (first, last)
}

/// Backward induction `V_{h+1}(pi, p) = p pi - pi^2/2 + E[max_pi' V_h(pi', p') - gamma |pi' - pi|]`
/// from `V_0 = 0`, stopped once the zone boundaries have not moved for
/// [`STABLE_STEPS`] steps.
pub fn backward_induction(grid: &DpGrid, costs: &CostParams, horizon: usize) -> Result<DpSolution> {
    if horizon == 0 {
        return Err(invalid("horizon must be at least 1"));
    }
    let (n_p, n_pi) = (grid.n_p(), grid.n_pi());
    let c = costs.gamma() * grid.dpi;
    let reward: Vec<f64> = grid
        .p_values
        .iter()
        .flat_map(|&p| grid.pi_values.iter().map(move |&x| p * x - 0.5 * x * x))
        .collect();
    let mut value = vec![0.0; n_p * n_pi];
    let mut transformed = vec![0.0; n_p * n_pi];
    let mut bounds: Vec<(usize, usize)> = Vec::new();
    let mut stable = 0;
    for h in 1..=horizon {
        transformed
            .par_chunks_mut(n_pi)
            .zip(value.par_chunks(n_pi))
            .for_each(|(out, v)| distance_transform(v, c, out));
        value
            .par_chunks_mut(n_pi)
            .enumerate()
            .for_each(|(i, out)| {
                out.copy_from_slice(&reward[i * n_pi..(i + 1) * n_pi]);
                let row = &grid.rows[i];
                for (j, w) in row.weights.iter().enumerate() {
                    let src = &transformed[(row.start + j) * n_pi..(row.start + j + 1) * n_pi];
                    for (o, s) in out.iter_mut().zip(src) {
                        *o += w * s;
                    }
                }
            });
        let next: Vec<(usize, usize)> = value.par_chunks(n_pi).map(|v| zone_bounds(v, c)).collect();
        stable = if next == bounds { stable + 1 } else { 0 };
        bounds = next;
        if stable >= STABLE_STEPS {
            return Ok(DpSolution {
                grid: grid.clone(),
                gamma: costs.gamma(),
                horizon: h,
                value,
            });
        }
    }
    Err(Error::NotConverged { horizon })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NoTradeInterval {
    pub p: f64,
    pub lower: f64,
    pub upper: f64,
}

/// The set `{pi : pi*(pi, p) = pi}` at every predictor node, required to be
/// one contiguous run of grid positions.
pub fn extract_no_trade(solution: &DpSolution) -> Result<Vec<NoTradeInterval>> {
    let g = &solution.grid;
    (0..g.n_p())
        .map(|i| {
            let pol = solution.policy(i);
            let idx: Vec<usize> = (0..pol.len()).filter(|&k| pol[k] == k).collect();
            let p = g.p_values[i];
            match (idx.first(), idx.last()) {
                (Some(&a), Some(&b)) if b - a + 1 == idx.len() => Ok(NoTradeInterval {
                    p,
                    lower: g.pi_values[a],
                    upper: g.pi_values[b],
                }),
                _ => Err(Error::NonContiguous { p }),
            }
        })
        .collect()
}

/// Outcome of the structural checks on a DP solution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StructureReport {
    pub concave: bool,
    /// Largest second difference of `V` in `pi`, relative to `max |V|`.
    pub worst_concavity: f64,
    pub trades_to_edge: bool,
    pub trade_violations: usize,
    pub idempotent: bool,
    pub predictor_inside: bool,
    /// Predictor rows (within the comparison window) whose nearest position
    /// node lies outside the zone.
    pub predictor_misses: usize,
}

impl StructureReport {
    pub fn all_pass(&self) -> bool {
        self.concave && self.trades_to_edge && self.idempotent && self.predictor_inside
    }
}

/// Concavity in `pi` (second differences at most `tol_rel * max|V|`),
/// trades landing on the nearer zone endpoint, idempotent trades, and the
/// predictor inside its zone for `|p| <= n_sigma/2` deviations.
pub fn check_structure(solution: &DpSolution, tol_rel: f64) -> StructureReport {
    let g = &solution.grid;
    let scale = solution.value.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let mut worst = f64::NEG_INFINITY;
    let mut violations = 0;
    let mut idempotent = true;
    let mut misses = 0;
    let window = 0.5 * g.n_sigma * g.sigma;
    for i in 0..g.n_p() {
        let v = solution.value_row(i);
        for k in 1..v.len() - 1 {
            worst = worst.max((v[k - 1] - 2.0 * v[k] + v[k + 1]) / scale.max(f64::MIN_POSITIVE));
        }
        let pol = solution.policy(i);
        let first = (0..pol.len()).find(|&k| pol[k] == k);
        let last = (0..pol.len()).rev().find(|&k| pol[k] == k);
        let (Some(a), Some(b)) = (first, last) else {
            violations += pol.len();
            continue;
        };
        for (k, &t) in pol.iter().enumerate() {
            if pol[t] != t {
                idempotent = false;
            }
            let want = if k < a {
                a
            } else if k > b {
                b
            } else {
                k
            };
            if t != want {
                violations += 1;
            }
        }
        let p = g.p_values[i];
        if p.abs() <= window {
            let near = g.nearest_pi(p);
            if near < a || near > b {
                misses += 1;
            }
        }
    }
    StructureReport {
        concave: worst <= tol_rel,
        worst_concavity: worst,
        trades_to_edge: violations == 0,
        trade_violations: violations,
        idempotent,
        predictor_inside: misses == 0,
        predictor_misses: misses,
    }
}

/// Zone edges interpolated at `p` from the two nearest predictor nodes.
pub fn no_trade_at(intervals: &[NoTradeInterval], p: f64) -> Option<(f64, f64)> {
    let i = intervals.partition_point(|z| z.p <= p);
    if i == 0 || i == intervals.len() {
        return None;
    }
    let (a, b) = (&intervals[i - 1], &intervals[i]);
    let t = (p - a.p) / (b.p - a.p);
    Some((
        a.lower + t * (b.lower - a.lower),
        a.upper + t * (b.upper - a.upper),
    ))
}

/// Writes `p, pi, V` rows.
pub fn write_value_csv<W: Write>(solution: &DpSolution, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let io = |e: csv::Error| invalid(format!("csv output failed: {e}"));
    w.write_record(["p", "pi", "V"]).map_err(io)?;
    let g = &solution.grid;
    for (i, &p) in g.p_values.iter().enumerate() {
        for (k, &x) in g.pi_values.iter().enumerate() {
            w.write_record(&[p.to_string(), x.to_string(), solution.value(i, k).to_string()])
                .map_err(io)?;
        }
    }
    w.flush().map_err(|e| invalid(format!("csv output failed: {e}")))
}

/// Writes `p, lower, upper` rows.
pub fn write_boundaries_csv<W: Write>(intervals: &[NoTradeInterval], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let io = |e: csv::Error| invalid(format!("csv output failed: {e}"));
    for z in intervals {
        w.serialize(z).map_err(io)?;
    }
    w.flush().map_err(|e| invalid(format!("csv output failed: {e}")))
}
