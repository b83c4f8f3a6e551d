//! Acceptance suite: one PASS/FAIL line per criterion, written straight to
//! stderr so the lines show up without `--nocapture`.

use std::io::Write;
use std::time::Instant;

use notrade_band::band::{
    asymptotic_discrete_band, asymptotic_large_gamma_width, asymptotic_large_p, asymptotic_small_p,
    band_at, band_curve, boundary_values, kolmogorov_residuals, solve_p1, solve_p2, EdgePair, DEFAULT_TOL,
};
use notrade_band::dp::{backward_induction, build_grid, check_structure, extract_no_trade, no_trade_at};
use notrade_band::ou::{continuous_std, CostParams, OuParams};
use notrade_band::cli::DEFAULT_SEED;
use notrade_band::sim::compare;

const TOL: f64 = DEFAULT_TOL;

fn standard() -> OuParams {
    OuParams::new(0.01, 0.01).unwrap()
}

fn sci(v: &[f64]) -> String {
    v.iter().map(|x| format!("{x:.2e}")).collect::<Vec<_>>().join(", ")
}

fn report(id: &str, ok: bool, started: Instant, detail: String) {
    let tag = if ok { "PASS" } else { "FAIL" };
    let line = format!("{tag} criterion {id} ({:.1?}): {detail}\n", started.elapsed());
    std::io::stderr().write_all(line.as_bytes()).unwrap();
}

#[test]
fn criterion_1_cube_root_law() {
    let t = Instant::now();
    let ou = standard();
    let mut errs = Vec::new();
    for r in [1e-3, 1e-4, 1e-5] {
        let c = CostParams::from_ratio(&ou, r).unwrap();
        let u = band_at(0.0, &ou, &c, TOL).unwrap().upper;
        errs.push((u / asymptotic_small_p(&c, &ou) - 1.0).abs());
    }
    let ok = errs.iter().all(|e| *e <= 0.05) && errs[0] > errs[1] && errs[1] > errs[2];
    report("1", ok, t, format!("relative errors at 1e-3, 1e-4, 1e-5: {}", sci(&errs)));
    assert!(ok);
}

#[test]
fn criterion_2_large_cost_width() {
    let t = Instant::now();
    let ou = standard();
    let limit = asymptotic_large_gamma_width(&ou);
    let errs: Vec<f64> = [5.0, 10.0, 20.0]
        .iter()
        .map(|&r| {
            let c = CostParams::from_ratio(&ou, r).unwrap();
            (band_at(0.0, &ou, &c, TOL).unwrap().width() / limit - 1.0).abs()
        })
        .collect();
    let ok = errs[2] <= 0.05 && errs[0] >= errs[1] && errs[1] >= errs[2];
    report("2", ok, t, format!("relative errors at 5, 10, 20: {}", sci(&errs)));
    assert!(ok);
}

#[test]
fn criterion_3_large_p_asymmetry() {
    let t = Instant::now();
    let ou = standard();
    let c = CostParams::from_ratio(&ou, 0.5).unwrap();
    let sigma = continuous_std(&ou);
    let mut ok = true;
    let mut detail = Vec::new();
    for k in [10.0, 20.0] {
        let p = k * sigma;
        assert!(ou.epsilon() * p < c.gamma());
        let b = band_at(p, &ou, &c, TOL).unwrap();
        let gap = p - asymptotic_large_p(p, &c, &ou).1;
        let up = (p - b.upper) / gap;
        let lo = (p - b.lower).abs() / gap;
        ok &= up <= 0.15 && (0.85..=1.15).contains(&lo);
        detail.push(format!("{k} sigma: (p - u)/g = {up:.3}, |p - l|/g = {lo:.3}"));
    }
    report("3", ok, t, detail.join("; "));
    assert!(ok, "lower edge is sqrt(2) further from p than sqrt(2 gamma eps p)");
}

#[test]
fn criterion_4_kolmogorov_residuals() {
    let t = Instant::now();
    let ou = standard();
    let (mut worst, mut worst_b) = (0.0_f64, 0.0_f64);
    for q1 in [-1.0, 0.0, 0.5, 1.5, 3.0] {
        for w in [0.1, 0.5, 1.0, 2.0, 4.0] {
            let pair = EdgePair {
                p1: q1 * ou.scale(),
                p2: (q1 - w) * ou.scale(),
                edge: 0.0,
                discrete_regime: false,
            };
            for k in 1..=20 {
                let p = pair.p2 + (pair.p1 - pair.p2) * k as f64 / 21.0;
                worst = worst.max(kolmogorov_residuals(p, &pair, &ou).unwrap().max_abs());
            }
            let [(g1, r1, a1), (g2, r2, a2)] = boundary_values(&pair, &ou).unwrap();
            for v in [g1, r1, a1, g2, r2, a2 - 1.0] {
                worst_b = worst_b.max(v.abs());
            }
        }
    }
    let ok = worst <= 1e-4 && worst_b <= 1e-8;
    report("4", ok, t, format!("worst residual {worst:.2e}, worst boundary error {worst_b:.2e}"));
    assert!(ok);
}

#[test]
fn criterion_5_dp_oracle_equivalence() {
    let t = Instant::now();
    let ou = standard();
    let c = CostParams::from_ratio(&ou, 0.1).unwrap();
    let sigma = continuous_std(&ou);
    let grid = build_grid(&ou, 8.0, 201, 6.0 * sigma, 601).unwrap();
    let sol = backward_induction(&grid, &c, 20_000).unwrap();
    let zones = extract_no_trade(&sol).unwrap();
    let rep = check_structure(&sol, 1e-9);
    let mut cells = Vec::new();
    for k in [-2.0, -1.0, 0.0, 1.0, 2.0] {
        let p = k * sigma;
        let (lo, hi) = no_trade_at(&zones, p).unwrap();
        let b = band_at(p, &ou, &c, TOL).unwrap();
        cells.push((lo - b.lower).abs().max((hi - b.upper).abs()) / grid.dpi);
    }
    let ok = cells.iter().all(|&x| x <= 2.0) && rep.all_pass();
    report(
        "5",
        ok,
        t,
        format!("cells apart at -2..2 sigma: {cells:.2?}; structure checks pass: {}", rep.all_pass()),
    );
    assert!(rep.all_pass());
    assert!(ok, "discrete-time DP zone is narrower than the continuous-time band");
}

const REFERENCE: [(f64, f64, f64); 6] = [
    (0.01, 110.44, 0.75),
    (0.1, 67.85, 0.67),
    (0.15, 54.97, 0.63),
    (0.2, 45.11, 0.60),
    (0.3, 30.95, 0.53),
    (0.5, 14.81, 0.41),
];

#[test]
fn criterion_6_table_regression() {
    let t = Instant::now();
    let ou = standard();
    let (mut a, mut b, mut c) = (true, true, true);
    for (ratio, reference, reference_se) in REFERENCE {
        let costs = CostParams::from_ratio(&ou, ratio).unwrap();
        let row = compare(&ou, &costs, 100, 50_000, DEFAULT_SEED).unwrap();
        let se = row.combined_stderr();
        let (opt, grid) = (row.optimal.mean_pnl, row.grid.mean_pnl);
        a &= opt >= grid - 2.0 * se;
        if ratio == 0.5 {
            b = grid == 0.0 && opt > 10.0;
        }
        let dev = (opt - reference).abs() / row.optimal.stderr.hypot(reference_se);
        c &= dev <= 5.0;
        eprintln!(
            "  ratio {ratio}: optimal {opt:.2} ({:.2}) grid {grid:.2} ({:.2}) width {:.4}; paired {:.2} ({:.2}); {dev:.2} se from {reference}",
            row.optimal.stderr, row.grid.stderr, row.grid_width, row.paired_difference, row.paired_stderr
        );
    }
    report("6a", a, t, "optimal not below grid search by more than 2 combined stderr".into());
    report("6b", b, t, "grid search PnL exactly 0 and optimal > 10 at ratio 0.5".into());
    report("6c", c, t, "optimal means within 5 combined stderr of the reference table".into());
    assert!(a && c);
    assert!(b, "the grid search finds a profitable constant band at ratio 0.5");
}

#[test]
fn criterion_7_structural_invariants() {
    let t = Instant::now();
    let ou = standard();
    let other = OuParams::new(0.04, 0.02).unwrap();
    let sigma = continuous_std(&ou);
    let (mut contained, mut sym, mut dual, mut univ) = (true, 0.0_f64, 0.0_f64, 0.0_f64);
    for ratio in [0.01, 0.1, 0.5, 2.0] {
        let c = CostParams::from_ratio(&ou, ratio).unwrap();
        let c2 = CostParams::from_ratio(&other, ratio).unwrap();
        let grid: Vec<f64> = (-24..=24).map(|k| k as f64 * 0.25 * sigma).collect();
        let pts = band_curve(&grid, &ou, &c, TOL).unwrap().points;
        let n = pts.len();
        for (i, b) in pts.iter().enumerate() {
            contained &= b.lower <= b.p && b.p <= b.upper;
            sym = sym.max((b.lower + pts[n - 1 - i].upper).abs() / ou.scale());
            let lo = solve_p2(b.p, &ou, &c, TOL).unwrap();
            let back = solve_p1(lo.p2, &ou, &c, TOL).unwrap();
            dual = dual.max((back.p1 - b.p).abs() / ou.scale());
            let q = b.p / ou.scale();
            let o = band_at(q * other.scale(), &other, &c2, TOL).unwrap();
            univ = univ
                .max((b.lower / ou.scale() - o.lower / other.scale()).abs())
                .max((b.upper / ou.scale() - o.upper / other.scale()).abs());
        }
    }
    let ok = contained && sym <= 10.0 * TOL && dual <= 10.0 * TOL && univ <= 10.0 * TOL;
    report(
        "7",
        ok,
        t,
        format!("contained {contained}, symmetry {sym:.1e}, duality {dual:.1e}, universality {univ:.1e}"),
    );
    assert!(ok);
}

#[test]
fn criterion_8_discrete_saturation() {
    let t = Instant::now();
    let ou = OuParams::new(0.5, 0.2).unwrap();
    let c = CostParams::new(0.2).unwrap();
    let grid = build_grid(&ou, 12.0, 241, 4.0, 801).unwrap();
    let sol = backward_induction(&grid, &c, 20_000).unwrap();
    let zones = extract_no_trade(&sol).unwrap();
    let p = 3.0 * c.gamma() / ou.epsilon();
    let (lo, hi) = no_trade_at(&zones, p).unwrap();
    let limit = asymptotic_discrete_band(&c);
    let err = ((hi - lo) / limit - 1.0).abs();
    let ok = err <= 0.25;
    report("8", ok, t, format!("width {:.4} at p = 3 gamma / eps vs 2 gamma = {limit}", hi - lo));
    assert!(ok);
}
