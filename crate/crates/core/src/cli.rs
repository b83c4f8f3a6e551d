//! The `notrade` command line: solve, band, simulate, compare, verify and
//! dp-dump. Data goes to `--out` or standard output, human text to standard
//! error. Every output embeds the resolved configuration.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::band::{band_at, band_curve, solve_p1, solve_p2, DEFAULT_TOL};
use crate::dp::{backward_induction, build_grid, extract_no_trade, write_boundaries_csv, write_value_csv};
use crate::error::{invalid, Error, Result};
use crate::ou::{continuous_std, cost_ratio, sample_path, stationary_std, CostParams, OuParams};
use crate::sim::{compare, default_candidates, grid_search_constant_band, simulate, Policy};
use crate::verify::{self, Level};

/// Seed used when none is given.
pub const DEFAULT_SEED: u64 = 20_160_413;
pub const DEFAULT_RATIO: f64 = 0.1;
pub const DEFAULT_EPSILON: f64 = 0.01;
pub const DEFAULT_BETA: f64 = 0.01;
pub const TABLE_RATIOS: [f64; 6] = [0.01, 0.1, 0.15, 0.2, 0.3, 0.5];

#[derive(Debug, Parser)]
#[command(name = "notrade", version, about = "Optimal no-trade band under linear costs")]
pub struct Cli {
    /// No human-readable text on stderr.
    #[arg(long, short, global = true)]
    pub quiet: bool,
    /// JSON instead of CSV on stdout.
    #[arg(long, global = true)]
    pub json: bool,
    /// TOML file whose keys mirror the flag names; flags win.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output file for the CSV; a JSON mirror is written next to it.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args, Default)]
pub struct ModelArgs {
    #[arg(long, global = true)]
    pub epsilon: Option<f64>,
    #[arg(long, global = true)]
    pub beta: Option<f64>,
    #[arg(long, global = true)]
    pub gamma: Option<f64>,
    /// gamma eps^{3/2} / beta; overrides --gamma.
    #[arg(long, global = true)]
    pub ratio: Option<f64>,
    #[arg(long, global = true)]
    pub tol: Option<f64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Edges of the band at one predictor value.
    Solve {
        #[arg(long, allow_negative_numbers = true)]
        p: Option<f64>,
    },
    /// Band curve over a grid in units of sigma_p = beta / sqrt(2 eps).
    Band {
        #[arg(long, allow_negative_numbers = true)]
        from: Option<f64>,
        #[arg(long, allow_negative_numbers = true)]
        to: Option<f64>,
        #[arg(long)]
        points: Option<usize>,
        /// Explicit comma-separated grid; replaces from/to/points.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        grid: Option<Vec<f64>>,
    },
    /// Monte Carlo PnL of one policy.
    Simulate {
        #[arg(long, value_enum)]
        policy: Option<PolicyChoice>,
        /// Width of the constant band.
        #[arg(long)]
        width: Option<f64>,
        #[command(flatten)]
        sim: SimArgs,
        /// CSV of the first predictor path (columns t, p).
        #[arg(long)]
        dump_path: Option<PathBuf>,
    },
    /// Optimal band against the grid-searched constant band, one row per ratio.
    Compare {
        #[arg(long, value_delimiter = ',')]
        ratios: Option<Vec<f64>>,
        #[command(flatten)]
        sim: SimArgs,
    },
    /// Self-checks; exits nonzero if any gating check fails.
    Verify {
        #[arg(long, value_enum)]
        level: Option<LevelChoice>,
        /// Multiplies every threshold; below 1 tightens.
        #[arg(long)]
        tolerance_scale: Option<f64>,
    },
    /// Value function and no-trade boundaries of the DP oracle.
    DpDump {
        #[arg(long)]
        n_sigma: Option<f64>,
        #[arg(long)]
        n_p: Option<usize>,
        /// Half-span of the position grid in stationary standard deviations.
        #[arg(long)]
        pi_span: Option<f64>,
        #[arg(long)]
        n_pi: Option<usize>,
        #[arg(long)]
        horizon: Option<usize>,
        /// CSV of the boundaries (columns p, lower, upper).
        #[arg(long)]
        boundaries: Option<PathBuf>,
    },
}

#[derive(Debug, Args, Default)]
pub struct SimArgs {
    #[arg(long)]
    pub n_paths: Option<usize>,
    #[arg(long)]
    pub path_length: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PolicyChoice {
    Optimal,
    Constant,
    Grid,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LevelChoice {
    Fast,
    Full,
}

/// Contents of a `--config` file.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct FileConfig {
    pub epsilon: Option<f64>,
    pub beta: Option<f64>,
    pub gamma: Option<f64>,
    pub ratio: Option<f64>,
    pub tol: Option<f64>,
    pub p: Option<f64>,
    pub from: Option<f64>,
    pub to: Option<f64>,
    pub points: Option<usize>,
    pub grid: Option<Vec<f64>>,
    pub policy: Option<PolicyChoice>,
    pub width: Option<f64>,
    pub n_paths: Option<usize>,
    pub path_length: Option<usize>,
    pub seed: Option<u64>,
    pub ratios: Option<Vec<f64>>,
    pub level: Option<LevelChoice>,
    pub tolerance_scale: Option<f64>,
    pub n_sigma: Option<f64>,
    pub n_p: Option<usize>,
    pub pi_span: Option<f64>,
    pub n_pi: Option<usize>,
    pub horizon: Option<usize>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)
            .map_err(|e| invalid(format!("cannot read {}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| invalid(format!("bad config {}: {e}", path.display())))
    }
}

/// The fully resolved parameters of one run, embedded in its outputs.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub command: &'static str,
    pub epsilon: f64,
    pub beta: f64,
    pub gamma: f64,
    pub ratio: f64,
    pub tol: f64,
    #[serde(flatten)]
    pub extra: serde_json::Map<String, serde_json::Value>,
}

impl RunConfig {
    fn set<T: Serialize>(&mut self, key: &str, v: T) {
        self.extra.insert(key.into(), serde_json::to_value(v).expect("serializable"));
    }

    fn header_lines(&self) -> String {
        let v = serde_json::to_value(self).expect("serializable");
        let mut s = String::new();
        for (k, v) in v.as_object().expect("object") {
            s.push_str(&format!("# {k} = {v}\n"));
        }
        s
    }
}

fn pick<T>(flag: Option<T>, file: Option<T>, default: T) -> T {
    flag.or(file).unwrap_or(default)
}

fn model(m: &ModelArgs, f: &FileConfig) -> Result<(OuParams, CostParams, f64)> {
    let ou = OuParams::new(
        pick(m.epsilon, f.epsilon, DEFAULT_EPSILON),
        pick(m.beta, f.beta, DEFAULT_BETA),
    )?;
    let costs = match (m.ratio, m.gamma, f.ratio, f.gamma) {
        (Some(r), ..) => CostParams::from_ratio(&ou, r)?,
        (None, Some(g), ..) => CostParams::new(g)?,
        (None, None, Some(r), _) => CostParams::from_ratio(&ou, r)?,
        (None, None, None, Some(g)) => CostParams::new(g)?,
        _ => CostParams::from_ratio(&ou, DEFAULT_RATIO)?,
    };
    let tol = pick(m.tol, f.tol, DEFAULT_TOL);
    if !(tol > 0.0) {
        return Err(invalid(format!("tol must be positive, got {tol}")));
    }
    Ok((ou, costs, tol))
}

enum Failure {
    Usage(String),
    Run(Error),
    Checks,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Run(e)
    }
}

struct Ctx {
    quiet: bool,
    json: bool,
    out: Option<PathBuf>,
}

impl Ctx {
    fn say(&self, msg: impl AsRef<str>) {
        if !self.quiet {
            eprintln!("{}", msg.as_ref());
        }
    }

    /// CSV (with `#` config lines) and JSON of `rows`.
    fn emit<R: Serialize>(&self, cfg: &RunConfig, rows: &[R]) -> Result<()> {
        let mut w = csv::Writer::from_writer(Vec::new());
        for r in rows {
            w.serialize(r).map_err(|e| invalid(format!("csv output failed: {e}")))?;
        }
        let body = w.into_inner().map_err(|e| invalid(format!("csv output failed: {e}")))?;
        let csv = format!("{}{}", cfg.header_lines(), String::from_utf8_lossy(&body));
        let json = serde_json::to_string_pretty(&serde_json::json!({ "config": cfg, "rows": rows }))
            .expect("serializable")
            + "\n";
        self.write(&csv, &json)
    }

    fn write(&self, csv: &str, json: &str) -> Result<()> {
        match &self.out {
            Some(path) => {
                write_file(path, csv)?;
                let mirror = path.with_extension("json");
                write_file(&mirror, json)?;
                self.say(format!("wrote {} and {}", path.display(), mirror.display()));
            }
            None => {
                let text = if self.json { json } else { csv };
                std::io::stdout()
                    .write_all(text.as_bytes())
                    .map_err(|e| invalid(format!("stdout: {e}")))?;
            }
        }
        Ok(())
    }
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| invalid(format!("cannot write {}: {e}", path.display())))
}

/// Parses `args` (program name first) and runs the command. Returns the
/// process exit code: 0 on success, 1 on a failed run or check, 2 on a
/// usage error.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let _ = e.print();
            return code;
        }
    };
    let ctx = Ctx {
        quiet: cli.quiet,
        json: cli.json,
        out: cli.out.clone(),
    };
    match execute(&cli, &ctx) {
        Ok(()) => 0,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            2
        }
        Err(Failure::Run(e)) => {
            eprintln!("error: {e}");
            1
        }
        Err(Failure::Checks) => 1,
    }
}

fn execute(cli: &Cli, ctx: &Ctx) -> std::result::Result<(), Failure> {
    let file = match &cli.config {
        Some(p) => FileConfig::load(p).map_err(|e| Failure::Usage(e.to_string()))?,
        None => FileConfig::default(),
    };
    let (ou, costs, tol) = model(&cli.model, &file).map_err(|e| Failure::Usage(e.to_string()))?;
    let mut cfg = RunConfig {
        command: "",
        epsilon: ou.epsilon(),
        beta: ou.beta(),
        gamma: costs.gamma(),
        ratio: cost_ratio(&ou, &costs),
        tol,
        extra: serde_json::Map::new(),
    };
    match &cli.command {
        Command::Solve { p } => {
            cfg.command = "solve";
            let p = p
                .or(file.p)
                .ok_or_else(|| Failure::Usage("solve needs --p".into()))?;
            cfg.set("p", p);
            cmd_solve(p, &ou, &costs, tol, &cfg, ctx)
        }
        Command::Band {
            from,
            to,
            points,
            grid,
        } => {
            cfg.command = "band";
            let grid = match grid.clone().or(file.grid.clone()) {
                Some(g) => g,
                None => {
                    let a = pick(*from, file.from, -4.0);
                    let b = pick(*to, file.to, 4.0);
                    let n = pick(*points, file.points, 161);
                    match n {
                        0 => Vec::new(),
                        1 => vec![a],
                        _ => (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect(),
                    }
                }
            };
            if grid.is_empty() {
                return Err(Failure::Usage("the band grid is empty".into()));
            }
            cfg.set("sigma_p", continuous_std(&ou));
            cfg.set("grid_sigma", &grid);
            cmd_band(&grid, &ou, &costs, tol, &cfg, ctx)
        }
        Command::Simulate {
            policy,
            width,
            sim,
            dump_path,
        } => {
            cfg.command = "simulate";
            let policy = pick(*policy, file.policy, PolicyChoice::Optimal);
            let width = width.or(file.width);
            if policy == PolicyChoice::Constant && width.is_none() {
                return Err(Failure::Usage("--policy constant needs --width".into()));
            }
            let s = resolve_sim(sim, &file, &mut cfg)?;
            cfg.set("policy", policy);
            if let Some(w) = width {
                cfg.set("width", w);
            }
            cmd_simulate(policy, width, s, dump_path.as_deref(), &ou, &costs, &cfg, ctx)
        }
        Command::Compare { ratios, sim } => {
            cfg.command = "compare";
            let ratios = ratios.clone().or(file.ratios.clone()).unwrap_or(TABLE_RATIOS.to_vec());
            if ratios.is_empty() {
                return Err(Failure::Usage("no ratios given".into()));
            }
            let s = resolve_sim(sim, &file, &mut cfg)?;
            cfg.set("ratios", &ratios);
            cmd_compare(&ratios, s, &ou, &cfg, ctx)
        }
        Command::Verify {
            level,
            tolerance_scale,
        } => {
            cfg.command = "verify";
            let level = match pick(*level, file.level, LevelChoice::Fast) {
                LevelChoice::Fast => Level::Fast,
                LevelChoice::Full => Level::Full,
            };
            let scale = pick(*tolerance_scale, file.tolerance_scale, 1.0);
            if !(scale > 0.0) {
                return Err(Failure::Usage(format!("tolerance scale must be positive, got {scale}")));
            }
            cfg.set("level", level);
            cfg.set("tolerance_scale", scale);
            cmd_verify(level, tol, scale, &cfg, ctx)
        }
        Command::DpDump {
            n_sigma,
            n_p,
            pi_span,
            n_pi,
            horizon,
            boundaries,
        } => {
            cfg.command = "dp-dump";
            let dims = DpDims {
                n_sigma: pick(*n_sigma, file.n_sigma, 8.0),
                n_p: pick(*n_p, file.n_p, 201),
                pi_span: pick(*pi_span, file.pi_span, 6.0),
                n_pi: pick(*n_pi, file.n_pi, 601),
                horizon: pick(*horizon, file.horizon, 20_000),
            };
            cfg.set("n_sigma", dims.n_sigma);
            cfg.set("n_p", dims.n_p);
            cfg.set("pi_span_sigma", dims.pi_span);
            cfg.set("n_pi", dims.n_pi);
            cfg.set("horizon", dims.horizon);
            cmd_dp_dump(dims, boundaries.as_deref(), &ou, &costs, &cfg, ctx)
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct SimSize {
    n_paths: usize,
    path_length: usize,
    seed: u64,
}

fn resolve_sim(a: &SimArgs, f: &FileConfig, cfg: &mut RunConfig) -> std::result::Result<SimSize, Failure> {
    let s = SimSize {
        n_paths: pick(a.n_paths, f.n_paths, 100),
        path_length: pick(a.path_length, f.path_length, 50_000),
        seed: pick(a.seed, f.seed, DEFAULT_SEED),
    };
    if s.n_paths < 2 || s.path_length < 1 {
        return Err(Failure::Usage("need at least 2 paths of length at least 1".into()));
    }
    cfg.set("n_paths", s.n_paths);
    cfg.set("path_length", s.path_length);
    cfg.set("seed", s.seed);
    Ok(s)
}

#[derive(Serialize)]
struct SolveRow {
    p: f64,
    lower: f64,
    upper: f64,
    /// Lower edge `p2` paired with `p1 = p`.
    p2_given_p1: f64,
    /// Upper edge `p1` paired with `p2 = p`.
    p1_given_p2: f64,
    ratio: f64,
    discrete_regime: bool,
}

fn cmd_solve(
    p: f64,
    ou: &OuParams,
    costs: &CostParams,
    tol: f64,
    cfg: &RunConfig,
    ctx: &Ctx,
) -> std::result::Result<(), Failure> {
    if costs.gamma() == 0.0 {
        return Err(Error::ZeroCost.into());
    }
    let b = band_at(p, ou, costs, tol)?;
    let down = solve_p2(p, ou, costs, tol)?;
    let up = solve_p1(p, ou, costs, tol)?;
    let row = SolveRow {
        p,
        lower: b.lower,
        upper: b.upper,
        p2_given_p1: down.p2,
        p1_given_p2: up.p1,
        ratio: cfg.ratio,
        discrete_regime: b.discrete_regime,
    };
    ctx.say(format!(
        "p = {p}: band [{:.6}, {:.6}]; p1 = {p} pairs with p2 = {:.6}; p2 = {p} pairs with p1 = {:.6}",
        b.lower, b.upper, down.p2, up.p1
    ));
    if b.discrete_regime {
        ctx.say("warning: eps |p| > gamma, the discrete-time regime where the band saturates at 2 gamma");
    }
    ctx.emit(cfg, &[row])?;
    Ok(())
}

#[derive(Serialize)]
struct BandRow {
    p: f64,
    p_over_sigma: f64,
    lower: f64,
    upper: f64,
    lower_over_sigma: f64,
    upper_over_sigma: f64,
}

fn cmd_band(
    grid_sigma: &[f64],
    ou: &OuParams,
    costs: &CostParams,
    tol: f64,
    cfg: &RunConfig,
    ctx: &Ctx,
) -> std::result::Result<(), Failure> {
    let sigma = continuous_std(ou);
    let grid: Vec<f64> = grid_sigma.iter().map(|k| k * sigma).collect();
    let curve = band_curve(&grid, ou, costs, tol)?;
    let rows: Vec<BandRow> = curve
        .points
        .iter()
        .map(|b| BandRow {
            p: b.p,
            p_over_sigma: b.p / sigma,
            lower: b.lower,
            upper: b.upper,
            lower_over_sigma: b.lower / sigma,
            upper_over_sigma: b.upper / sigma,
        })
        .collect();
    let discrete = curve.points.iter().filter(|b| b.discrete_regime).count();
    ctx.say(format!("{} band points, sigma_p = {sigma:.6}", rows.len()));
    if discrete > 0 {
        ctx.say(format!("warning: {discrete} points in the discrete-time regime"));
    }
    ctx.emit(cfg, &rows)?;
    Ok(())
}

#[derive(Serialize)]
struct SimRow {
    ratio: f64,
    policy: &'static str,
    mean_pnl: f64,
    stderr: f64,
    mean_gain: f64,
    mean_risk: f64,
    mean_cost: f64,
    n_paths: usize,
    path_length: usize,
    seed: u64,
}

#[allow(clippy::too_many_arguments)]
fn cmd_simulate(
    choice: PolicyChoice,
    width: Option<f64>,
    s: SimSize,
    dump_path: Option<&Path>,
    ou: &OuParams,
    costs: &CostParams,
    cfg: &RunConfig,
    ctx: &Ctx,
) -> std::result::Result<(), Failure> {
    let (label, result) = match choice {
        PolicyChoice::Optimal => {
            let pol = Policy::analytic(ou, costs)?;
            ("optimal", simulate(&pol, ou, costs, s.n_paths, s.path_length, s.seed)?)
        }
        PolicyChoice::Constant => {
            let pol = Policy::constant(width.expect("checked"))?;
            ("constant", simulate(&pol, ou, costs, s.n_paths, s.path_length, s.seed)?)
        }
        PolicyChoice::Grid => {
            let cands = default_candidates(ou, costs)?;
            let (b, r) = grid_search_constant_band(ou, costs, &cands, s.n_paths, s.path_length, s.seed)?;
            ctx.say(format!("grid search picked width {b:.6}"));
            ("grid", r)
        }
    };
    ctx.say(format!(
        "{label}: mean PnL {:.4} ({:.4}) = gain {:.4} - risk {:.4} - cost {:.4}",
        result.mean_pnl, result.stderr, result.mean_gain, result.mean_risk, result.mean_cost
    ));
    if let Some(path) = dump_path {
        let p = sample_path(ou, 0.0, s.path_length + 1, s.seed)?;
        let mut text = cfg.header_lines();
        text.push_str("t,p\n");
        for (t, v) in p.values.iter().enumerate() {
            text.push_str(&format!("{t},{v}\n"));
        }
        write_file(path, &text)?;
    }
    let row = SimRow {
        ratio: cfg.ratio,
        policy: label,
        mean_pnl: result.mean_pnl,
        stderr: result.stderr,
        mean_gain: result.mean_gain,
        mean_risk: result.mean_risk,
        mean_cost: result.mean_cost,
        n_paths: result.n_paths,
        path_length: result.path_length,
        seed: result.seed,
    };
    ctx.emit(cfg, &[row])?;
    Ok(())
}

#[derive(Serialize)]
struct CompareRow {
    ratio: f64,
    optimal_mean_pnl: f64,
    optimal_stderr: f64,
    grid_mean_pnl: f64,
    grid_stderr: f64,
    grid_width: f64,
    paired_difference: f64,
    paired_stderr: f64,
    n_paths: usize,
    path_length: usize,
    seed: u64,
}

fn cmd_compare(
    ratios: &[f64],
    s: SimSize,
    ou: &OuParams,
    cfg: &RunConfig,
    ctx: &Ctx,
) -> std::result::Result<(), Failure> {
    let mut rows = Vec::new();
    ctx.say("ratio    optimal            grid search");
    for &r in ratios {
        let costs = CostParams::from_ratio(ou, r)?;
        let c = compare(ou, &costs, s.n_paths, s.path_length, s.seed)?;
        ctx.say(format!(
            "{r:<8} {:>8.2} ({:.2})    {:>8.2} ({:.2})",
            c.optimal.mean_pnl, c.optimal.stderr, c.grid.mean_pnl, c.grid.stderr
        ));
        rows.push(CompareRow {
            ratio: c.ratio,
            optimal_mean_pnl: c.optimal.mean_pnl,
            optimal_stderr: c.optimal.stderr,
            grid_mean_pnl: c.grid.mean_pnl,
            grid_stderr: c.grid.stderr,
            grid_width: c.grid_width,
            paired_difference: c.paired_difference,
            paired_stderr: c.paired_stderr,
            n_paths: s.n_paths,
            path_length: s.path_length,
            seed: s.seed,
        });
    }
    ctx.emit(cfg, &rows)?;
    Ok(())
}

fn cmd_verify(level: Level, tol: f64, scale: f64, cfg: &RunConfig, ctx: &Ctx) -> std::result::Result<(), Failure> {
    let report = verify::run(level, tol, scale)?;
    for c in &report.checks {
        let tag = match (c.passed, c.informational) {
            (true, _) => "PASS",
            (false, true) => "INFO",
            (false, false) => "FAIL",
        };
        ctx.say(format!("{tag} {}: {}", c.name, c.detail));
    }
    let json = serde_json::to_string_pretty(&serde_json::json!({ "config": cfg, "report": report }))
        .expect("serializable")
        + "\n";
    match &ctx.out {
        Some(path) => {
            write_file(path, &json)?;
            ctx.say(format!("wrote {}", path.display()));
        }
        None => print!("{json}"),
    }
    if report.passed() {
        Ok(())
    } else {
        Err(Failure::Checks)
    }
}

#[derive(Debug, Clone, Copy)]
struct DpDims {
    n_sigma: f64,
    n_p: usize,
    pi_span: f64,
    n_pi: usize,
    horizon: usize,
}

fn cmd_dp_dump(
    d: DpDims,
    boundaries: Option<&Path>,
    ou: &OuParams,
    costs: &CostParams,
    cfg: &RunConfig,
    ctx: &Ctx,
) -> std::result::Result<(), Failure> {
    let sigma = stationary_std(ou);
    let grid = build_grid(ou, d.n_sigma, d.n_p, d.pi_span * sigma, d.n_pi)?;
    let sol = backward_induction(&grid, costs, d.horizon)?;
    let zones = extract_no_trade(&sol)?;
    ctx.say(format!("converged after {} steps", sol.horizon));
    let mut values = Vec::new();
    write_value_csv(&sol, &mut values)?;
    let csv = cfg.header_lines() + &String::from_utf8_lossy(&values);
    let json = serde_json::to_string_pretty(&serde_json::json!({
        "config": cfg,
        "horizon": sol.horizon,
        "boundaries": zones,
    }))
    .expect("serializable")
        + "\n";
    ctx.write(&csv, &json)?;
    if let Some(path) = boundaries {
        let mut b = Vec::new();
        write_boundaries_csv(&zones, &mut b)?;
        write_file(path, &(cfg.header_lines() + &String::from_utf8_lossy(&b)))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ratio_beats_gamma_and_flags_beat_the_file() {
        let file = FileConfig {
            ratio: Some(0.3),
            epsilon: Some(0.04),
            ..Default::default()
        };
        let (ou, c, _) = model(&ModelArgs::default(), &file).unwrap();
        assert_eq!(ou.epsilon(), 0.04);
        assert!((cost_ratio(&ou, &c) - 0.3).abs() < 1e-12);

        let flags = ModelArgs {
            gamma: Some(2.0),
            ..Default::default()
        };
        let (_, c, _) = model(&flags, &file).unwrap();
        assert_eq!(c.gamma(), 2.0);

        let flags = ModelArgs {
            gamma: Some(2.0),
            ratio: Some(0.1),
            ..Default::default()
        };
        let (ou, c, _) = model(&flags, &FileConfig::default()).unwrap();
        assert!((cost_ratio(&ou, &c) - 0.1).abs() < 1e-12);
    }

    #[test]
    fn defaults() {
        let (ou, c, tol) = model(&ModelArgs::default(), &FileConfig::default()).unwrap();
        assert_eq!((ou.epsilon(), ou.beta(), tol), (DEFAULT_EPSILON, DEFAULT_BETA, DEFAULT_TOL));
        assert!((c.gamma() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn config_rejects_unknown_keys() {
        assert!(toml::from_str::<FileConfig>("n-paths = 3\nseed = 4").is_ok());
        assert!(toml::from_str::<FileConfig>("n_paths = 3").is_err());
    }

    #[test]
    fn header_lines_hold_the_config() {
        let mut cfg = RunConfig {
            command: "band",
            epsilon: 0.01,
            beta: 0.01,
            gamma: 1.0,
            ratio: 0.1,
            tol: 1e-10,
            extra: serde_json::Map::new(),
        };
        cfg.set("seed", 7u64);
        let h = cfg.header_lines();
        assert!(h.lines().all(|l| l.starts_with("# ")));
        assert!(h.contains("# seed = 7\n") && h.contains("# command = \"band\"\n"));
    }
}
