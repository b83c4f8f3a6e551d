//! PnL of the optimal band, a constant band and the frictionless policy.

use notrade_band::ou::{CostParams, OuParams};
use notrade_band::sim::{simulate, Policy};

fn main() -> notrade_band::Result<()> {
    let ou = OuParams::new(0.01, 0.01)?;
    let costs = CostParams::from_ratio(&ou, 0.1)?;
    let (n_paths, length, seed) = (20, 50_000, 1);

    let optimal = Policy::analytic(&ou, &costs)?;
    let constant = Policy::constant(0.09)?;
    for pol in [&optimal, &constant] {
        let r = simulate(pol, &ou, &costs, n_paths, length, seed)?;
        println!(
            "{:<28} {:>8.2} ({:.2})  gain {:.2} risk {:.2} cost {:.2}",
            pol.description, r.mean_pnl, r.stderr, r.mean_gain, r.mean_risk, r.mean_cost
        );
    }

    let free = CostParams::new(0.0)?;
    let r = simulate(&Policy::constant(0.0)?, &ou, &free, n_paths, length, seed)?;
    println!("frictionless                 {:>8.2} ({:.2})", r.mean_pnl, r.stderr);
    Ok(())
}
