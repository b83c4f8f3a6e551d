//! Trading policies run over simulated predictor paths, with the PnL split
//! into gain, risk and cost.

use rayon::prelude::*;
use serde::Serialize;

use crate::band::{band_at, band_curve, BandCurve, DEFAULT_TOL};
use crate::error::{invalid, Error, Result};
use crate::ou::{cost_ratio, normal, path_rng, stationary_std, step, CostParams, OuParams};

/// Half-range of the analytic band table, in stationary standard deviations.
pub const TABLE_HALF_RANGE: f64 = 8.0;
pub const TABLE_NODES: usize = 401;
/// Number of log-spaced constant-band widths tried by the grid search.
pub const GRID_CANDIDATES: usize = 60;

/// Solved band edges on a predictor grid, interpolated linearly.
#[derive(Debug, Clone, PartialEq)]
pub struct BandTable {
    p: Vec<f64>,
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl BandTable {
    pub fn from_curve(curve: &BandCurve) -> Result<Self> {
        if curve.points.len() < 2 {
            return Err(Error::Grid("band table needs at least two nodes".into()));
        }
        Ok(BandTable {
            p: curve.points.iter().map(|pt| pt.p).collect(),
            lower: curve.points.iter().map(|pt| pt.lower).collect(),
            upper: curve.points.iter().map(|pt| pt.upper).collect(),
        })
    }

    /// `(lower, upper)` at `p`; linear extrapolation is allowed up to one
    /// grid spacing past either end.
    pub fn edges(&self, p: f64) -> Result<(f64, f64)> {
        let n = self.p.len();
        let (first, last) = (self.p[0], self.p[n - 1]);
        let (d_lo, d_hi) = (self.p[1] - first, last - self.p[n - 2]);
        if !(p >= first - d_lo && p <= last + d_hi) {
            return Err(Error::Extrapolation {
                p,
                lo: first,
                hi: last,
            });
        }
        let i = self.p.partition_point(|&x| x <= p).clamp(1, n - 1) - 1;
        let t = (p - self.p[i]) / (self.p[i + 1] - self.p[i]);
        let lerp = |v: &[f64]| v[i] + t * (v[i + 1] - v[i]);
        Ok((lerp(&self.lower), lerp(&self.upper)))
    }

    pub fn range(&self) -> (f64, f64) {
        (self.p[0], self.p[self.p.len() - 1])
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum PolicyKind {
    AnalyticBand(BandTable),
    ConstantBand { width: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Policy {
    pub kind: PolicyKind,
    pub description: String,
}

impl Policy {
    /// Symmetric band `[p - B/2, p + B/2]`.
    pub fn constant(width: f64) -> Result<Self> {
        if !(width >= 0.0 && width.is_finite()) {
            return Err(invalid(format!("band width must be finite and >= 0, got {width}")));
        }
        Ok(Policy {
            kind: PolicyKind::ConstantBand { width },
            description: format!("constant band B = {width:.6}"),
        })
    }

    /// Optimal band tabulated on `TABLE_NODES` points over
    /// `±TABLE_HALF_RANGE` stationary standard deviations.
    pub fn analytic(params: &OuParams, costs: &CostParams) -> Result<Self> {
        let h = TABLE_HALF_RANGE * stationary_std(params);
        let grid: Vec<f64> = (0..TABLE_NODES)
            .map(|i| {
                let k = i as i64 - (TABLE_NODES / 2) as i64;
                h * k as f64 / (TABLE_NODES / 2) as f64
            })
            .collect();
        let curve = band_curve(&grid, params, costs, DEFAULT_TOL)?;
        Self::from_curve(&curve)
    }

    pub fn from_curve(curve: &BandCurve) -> Result<Self> {
        Ok(Policy {
            kind: PolicyKind::AnalyticBand(BandTable::from_curve(curve)?),
            description: format!(
                "optimal band, ratio {:.4}",
                cost_ratio(&curve.params, &curve.costs)
            ),
        })
    }

    pub fn edges(&self, p: f64) -> Result<(f64, f64)> {
        match &self.kind {
            PolicyKind::ConstantBand { width } => Ok((p - 0.5 * width, p + 0.5 * width)),
            PolicyKind::AnalyticBand(table) => table.edges(p),
        }
    }

    pub fn label(&self) -> &'static str {
        match self.kind {
            PolicyKind::AnalyticBand(_) => "optimal",
            PolicyKind::ConstantBand { .. } => "constant",
        }
    }
}

/// Keeps the position inside the band, trading to the nearer edge when
/// outside.
pub fn apply_policy(pi_prev: f64, p: f64, policy: &Policy) -> Result<f64> {
    let (lower, upper) = policy.edges(p)?;
    Ok(pi_prev.clamp(lower, upper))
}

/// `(p pi, pi^2 / 2, gamma |pi - pi_prev|)`.
pub fn pnl_step(pi: f64, pi_prev: f64, p: f64, costs: &CostParams) -> (f64, f64, f64) {
    (p * pi, 0.5 * pi * pi, costs.gamma() * (pi - pi_prev).abs())
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct PathTotals {
    pub gain: f64,
    pub risk: f64,
    pub cost: f64,
}

impl PathTotals {
    pub fn pnl(&self) -> f64 {
        self.gain - self.risk - self.cost
    }

    fn add(&mut self, (g, r, c): (f64, f64, f64)) {
        self.gain += g;
        self.risk += r;
        self.cost += c;
    }
}

/// Positions and totals of one policy along one predictor path.
#[derive(Debug, Clone, PartialEq)]
pub struct PathOutcome {
    pub positions: Vec<f64>,
    pub totals: PathTotals,
}

/// Runs `policy` along `path = p_0 .. p_T` from `pi_0 = 0`, accounting
/// steps `t = 1 .. T`.
pub fn run_path(policy: &Policy, path: &[f64], costs: &CostParams) -> Result<PathOutcome> {
    let mut positions = Vec::with_capacity(path.len());
    let mut totals = PathTotals::default();
    let mut pi = 0.0;
    positions.push(pi);
    for &p in path.iter().skip(1) {
        let next = apply_policy(pi, p, policy)?;
        totals.add(pnl_step(next, pi, p, costs));
        pi = next;
        positions.push(pi);
    }
    Ok(PathOutcome { positions, totals })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SimResult {
    pub mean_pnl: f64,
    pub stderr: f64,
    pub n_paths: usize,
    pub path_length: usize,
    pub mean_gain: f64,
    pub mean_risk: f64,
    pub mean_cost: f64,
    pub seed: u64,
}

impl SimResult {
    fn from_totals(totals: &[PathTotals], path_length: usize, seed: u64) -> Self {
        let n = totals.len() as f64;
        let pnl: Vec<f64> = totals.iter().map(PathTotals::pnl).collect();
        let (mean, stderr) = mean_stderr(&pnl);
        SimResult {
            mean_pnl: mean,
            stderr,
            n_paths: totals.len(),
            path_length,
            mean_gain: totals.iter().map(|t| t.gain).sum::<f64>() / n,
            mean_risk: totals.iter().map(|t| t.risk).sum::<f64>() / n,
            mean_cost: totals.iter().map(|t| t.cost).sum::<f64>() / n,
            seed,
        }
    }
}

fn check_sizes(n_paths: usize, path_length: usize) -> Result<()> {
    if n_paths < 2 {
        return Err(invalid(format!("need at least 2 paths, got {n_paths}")));
    }
    if path_length == 0 {
        return Err(invalid("path length must be at least 1"));
    }
    Ok(())
}

/// Per-path totals of every policy on the same `n_paths` paths of
/// `path_length` steps. Path `i` draws its normals from `path_rng(seed, i)`,
/// so results do not depend on thread scheduling.
fn path_totals(
    policies: &[Policy],
    params: &OuParams,
    costs: &CostParams,
    n_paths: usize,
    path_length: usize,
    seed: u64,
) -> Result<Vec<Vec<PathTotals>>> {
    check_sizes(n_paths, path_length)?;
    (0..n_paths)
        .into_par_iter()
        .map(|i| {
            let mut rng = path_rng(seed, i as u64);
            let mut pis = vec![0.0; policies.len()];
            let mut totals = vec![PathTotals::default(); policies.len()];
            let mut p = 0.0;
            for _ in 0..path_length {
                p = step(p, params, normal(&mut rng));
                for ((policy, pi), tot) in policies.iter().zip(pis.iter_mut()).zip(totals.iter_mut()) {
                    let next = apply_policy(*pi, p, policy)?;
                    tot.add(pnl_step(next, *pi, p, costs));
                    *pi = next;
                }
            }
            Ok(totals)
        })
        .collect()
}

fn column(per_path: &[Vec<PathTotals>], k: usize) -> Vec<PathTotals> {
    per_path.iter().map(|row| row[k]).collect()
}

/// Runs every policy on the same paths; see [`simulate`].
pub fn simulate_many(
    policies: &[Policy],
    params: &OuParams,
    costs: &CostParams,
    n_paths: usize,
    path_length: usize,
    seed: u64,
) -> Result<Vec<SimResult>> {
    let per_path = path_totals(policies, params, costs, n_paths, path_length, seed)?;
    Ok((0..policies.len())
        .map(|k| SimResult::from_totals(&column(&per_path, k), path_length, seed))
        .collect())
}

/// Mean PnL of `policy` over `n_paths` paths started at `p_0 = 0`,
/// `pi_0 = 0`, with its standard error and decomposition.
pub fn simulate(
    policy: &Policy,
    params: &OuParams,
    costs: &CostParams,
    n_paths: usize,
    path_length: usize,
    seed: u64,
) -> Result<SimResult> {
    let mut r = simulate_many(std::slice::from_ref(policy), params, costs, n_paths, path_length, seed)?;
    Ok(r.remove(0))
}

/// Seed of the training set used by the grid search; its paths never
/// coincide with those of `seed`.
pub fn training_seed(seed: u64) -> u64 {
    seed ^ 0x9E37_79B9_7F4A_7C15
}

/// 60 log-spaced widths over `[1e-3, 20]` stationary standard deviations,
/// plus the optimal band's width at `p = 0`, ascending.
pub fn default_candidates(params: &OuParams, costs: &CostParams) -> Result<Vec<f64>> {
    let sigma = stationary_std(params);
    let (lo, hi) = ((1e-3 * sigma).ln(), (20.0 * sigma).ln());
    let mut c: Vec<f64> = (0..GRID_CANDIDATES)
        .map(|i| (lo + (hi - lo) * i as f64 / (GRID_CANDIDATES - 1) as f64).exp())
        .collect();
    c.push(band_at(0.0, params, costs, DEFAULT_TOL)?.width());
    c.sort_by(f64::total_cmp);
    Ok(c)
}

/// Picks the constant width with the best mean PnL on the training paths
/// (ties go to the wider band) and reports it on the evaluation paths of
/// `seed`.
pub fn grid_search_constant_band(
    params: &OuParams,
    costs: &CostParams,
    candidates: &[f64],
    n_paths: usize,
    path_length: usize,
    seed: u64,
) -> Result<(f64, SimResult)> {
    let best = train_constant_band(params, costs, candidates, n_paths, path_length, seed)?;
    let result = simulate(&Policy::constant(best)?, params, costs, n_paths, path_length, seed)?;
    Ok((best, result))
}

fn train_constant_band(
    params: &OuParams,
    costs: &CostParams,
    candidates: &[f64],
    n_paths: usize,
    path_length: usize,
    seed: u64,
) -> Result<f64> {
    if candidates.is_empty() {
        return Err(invalid("grid search needs at least one candidate width"));
    }
    let policies = candidates
        .iter()
        .map(|&b| Policy::constant(b))
        .collect::<Result<Vec<_>>>()?;
    let train = simulate_many(&policies, params, costs, n_paths, path_length, training_seed(seed))?;
    let mut best = (candidates[0], train[0].mean_pnl);
    for (&b, r) in candidates.iter().zip(&train).skip(1) {
        if r.mean_pnl > best.1 || (r.mean_pnl == best.1 && b > best.0) {
            best = (b, r.mean_pnl);
        }
    }
    Ok(best.0)
}

/// One row of the optimal-versus-constant comparison. Both policies are
/// evaluated on the same paths.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ComparisonRow {
    pub ratio: f64,
    pub optimal: SimResult,
    pub grid: SimResult,
    pub grid_width: f64,
    /// Mean and standard error of the per-path difference optimal - grid.
    pub paired_difference: f64,
    pub paired_stderr: f64,
}

impl ComparisonRow {
    pub fn combined_stderr(&self) -> f64 {
        self.optimal.stderr.hypot(self.grid.stderr)
    }
}

pub fn compare(
    params: &OuParams,
    costs: &CostParams,
    n_paths: usize,
    path_length: usize,
    seed: u64,
) -> Result<ComparisonRow> {
    check_sizes(n_paths, path_length)?;
    let candidates = default_candidates(params, costs)?;
    let width = train_constant_band(params, costs, &candidates, n_paths, path_length, seed)?;
    let policies = [Policy::analytic(params, costs)?, Policy::constant(width)?];
    let per_path = path_totals(&policies, params, costs, n_paths, path_length, seed)?;
    let d: Vec<f64> = per_path.iter().map(|row| row[0].pnl() - row[1].pnl()).collect();
    let (mean, se) = mean_stderr(&d);
    Ok(ComparisonRow {
        ratio: cost_ratio(params, costs),
        optimal: SimResult::from_totals(&column(&per_path, 0), path_length, seed),
        grid: SimResult::from_totals(&column(&per_path, 1), path_length, seed),
        grid_width: width,
        paired_difference: mean,
        paired_stderr: se,
    })
}

fn mean_stderr(x: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mean = x.iter().sum::<f64>() / n;
    let var = x.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ou::sample_path;

    fn setup(ratio: f64) -> (OuParams, CostParams) {
        let ou = OuParams::new(0.01, 0.01).unwrap();
        let c = CostParams::from_ratio(&ou, ratio).unwrap();
        (ou, c)
    }

    #[test]
    fn pnl_step_arithmetic() {
        let c = CostParams::new(0.5).unwrap();
        assert_eq!(pnl_step(0.0, 0.0, 3.0, &c), (0.0, 0.0, 0.0));
        assert_eq!(pnl_step(1.0, 0.0, 2.0, &c), (2.0, 0.5, 0.5));
        let one = CostParams::new(1.0).unwrap();
        assert_eq!(pnl_step(-1.0, 1.0, 0.0, &one), (-0.0, 0.5, 2.0));
    }

    #[test]
    fn policy_clamps_to_band() {
        let pol = Policy::constant(0.2).unwrap();
        assert_eq!(apply_policy(0.55, 0.5, &pol).unwrap(), 0.55);
        assert!((apply_policy(1.6, 0.5, &pol).unwrap() - 0.6).abs() < 1e-15);
        assert!((apply_policy(-3.0, 0.5, &pol).unwrap() - 0.4).abs() < 1e-15);
        let zero = Policy::constant(0.0).unwrap();
        assert_eq!(apply_policy(7.0, -0.25, &zero).unwrap(), -0.25);
        assert!(Policy::constant(-1.0).is_err());
    }

    #[test]
    fn table_refuses_far_extrapolation() {
        let (ou, c) = setup(0.1);
        let pol = Policy::analytic(&ou, &c).unwrap();
        let PolicyKind::AnalyticBand(table) = &pol.kind else {
            panic!("analytic policy")
        };
        let (lo, hi) = table.range();
        let spacing = (hi - lo) / (TABLE_NODES - 1) as f64;
        assert!(pol.edges(hi + 0.5 * spacing).is_ok());
        assert!(matches!(
            pol.edges(hi + 1.5 * spacing),
            Err(Error::Extrapolation { .. })
        ));
        assert!(pol.edges(lo - 1.5 * spacing).is_err());
    }

    #[test]
    fn positions_stay_in_band_and_totals_decompose() {
        let (ou, c) = setup(0.1);
        let pol = Policy::analytic(&ou, &c).unwrap();
        let path = sample_path(&ou, 0.0, 5000, 11).unwrap();
        let out = run_path(&pol, &path.values, &c).unwrap();
        for (t, &p) in path.values.iter().enumerate().skip(1) {
            let (l, u) = pol.edges(p).unwrap();
            assert!(l <= out.positions[t] && out.positions[t] <= u);
        }
        let t = out.totals;
        assert!((t.pnl() - (t.gain - t.risk - t.cost)).abs() < 1e-12);
    }

    #[test]
    fn simulation_is_deterministic_and_decomposes() {
        let (ou, c) = setup(0.2);
        let pol = Policy::constant(0.05).unwrap();
        let a = simulate(&pol, &ou, &c, 8, 2000, 5).unwrap();
        let b = simulate(&pol, &ou, &c, 8, 2000, 5).unwrap();
        assert_eq!(a, b);
        assert!((a.mean_pnl - (a.mean_gain - a.mean_risk - a.mean_cost)).abs() < 1e-9);
        assert!(a.stderr >= 0.0);
        assert!(simulate(&pol, &ou, &c, 1, 10, 5).is_err());
    }

    #[test]
    fn simulate_many_matches_single_runs() {
        let (ou, c) = setup(0.2);
        let pols = [Policy::constant(0.01).unwrap(), Policy::constant(0.2).unwrap()];
        let many = simulate_many(&pols, &ou, &c, 4, 1000, 9).unwrap();
        for (p, r) in pols.iter().zip(&many) {
            assert_eq!(simulate(p, &ou, &c, 4, 1000, 9).unwrap(), *r);
        }
    }

    #[test]
    fn zero_cost_grid_search_tracks_predictor() {
        let ou = OuParams::new(0.01, 0.01).unwrap();
        let c = CostParams::new(0.0).unwrap();
        let (b, _) = grid_search_constant_band(&ou, &c, &[0.0, 0.01, 0.1], 4, 2000, 3).unwrap();
        assert_eq!(b, 0.0);
    }

    #[test]
    fn grid_search_ties_go_to_wider_band() {
        // bands wider than any excursion from zero never trade: PnL exactly 0
        let (ou, c) = setup(0.5);
        let (b, r) = grid_search_constant_band(&ou, &c, &[50.0, 100.0], 3, 500, 1).unwrap();
        assert_eq!(b, 100.0);
        assert_eq!(r.mean_pnl, 0.0);
        assert_eq!(r.stderr, 0.0);
    }

    #[test]
    fn candidates_cover_the_range() {
        let (ou, c) = setup(0.1);
        let cand = default_candidates(&ou, &c).unwrap();
        assert_eq!(cand.len(), GRID_CANDIDATES + 1);
        assert!(cand.windows(2).all(|w| w[0] <= w[1]));
        let sigma = stationary_std(&ou);
        assert!((cand[0] / sigma - 1e-3).abs() < 1e-12);
        assert!((cand[GRID_CANDIDATES] / sigma - 20.0).abs() < 1e-9);
    }
}
