//! Brute-force Bellman solution against the analytic band at ratio 0.1.

use notrade_band::band::{band_at, DEFAULT_TOL};
use notrade_band::dp::{backward_induction, build_grid, check_structure, extract_no_trade, no_trade_at};
use notrade_band::ou::{continuous_std, CostParams, OuParams};

fn main() -> notrade_band::Result<()> {
    let ou = OuParams::new(0.01, 0.01)?;
    let costs = CostParams::from_ratio(&ou, 0.1)?;
    let sigma = continuous_std(&ou);

    let grid = build_grid(&ou, 8.0, 201, 6.0 * sigma, 601)?;
    let t = std::time::Instant::now();
    let sol = backward_induction(&grid, &costs, 20_000)?;
    println!(
        "converged after {} steps in {:.2?}, position cell {:.5}",
        sol.horizon,
        t.elapsed(),
        grid.dpi
    );

    let zones = extract_no_trade(&sol)?;
    println!("{:>8} {:>10} {:>10} {:>10} {:>10} {:>7}", "p/sigma", "dp lower", "lower", "dp upper", "upper", "cells");
    for k in [-2.0, -1.0, 0.0, 1.0, 2.0] {
        let p = k * sigma;
        let (lo, hi) = no_trade_at(&zones, p).expect("inside grid");
        let band = band_at(p, &ou, &costs, DEFAULT_TOL)?;
        let cells = (lo - band.lower).abs().max((hi - band.upper).abs()) / grid.dpi;
        println!("{k:>8.1} {lo:>10.5} {:>10.5} {hi:>10.5} {:>10.5} {cells:>7.2}", band.lower, band.upper);
    }
    println!("{:?}", check_structure(&sol, 1e-9));
    Ok(())
}
