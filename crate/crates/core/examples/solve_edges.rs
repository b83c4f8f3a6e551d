//! Edges of the band at a few predictor values, and the paired edge of each.

use notrade_band::band::{band_at, solve_p1, solve_p2, DEFAULT_TOL};
use notrade_band::ou::{cost_ratio, continuous_std, CostParams, OuParams};

fn main() -> notrade_band::Result<()> {
    let ou = OuParams::new(0.01, 0.01)?;
    let costs = CostParams::from_ratio(&ou, 0.1)?;
    let sigma = continuous_std(&ou);
    println!("gamma = {}, ratio = {}, sigma_p = beta / sqrt(2 eps) = {sigma:.5}", costs.gamma(), cost_ratio(&ou, &costs));

    println!("{:>8} {:>10} {:>10} {:>10} {:>10}", "p/sigma", "lower", "upper", "p2(p)", "p1(p)");
    for k in [-3.0, -1.0, 0.0, 0.5, 1.0, 3.0] {
        let p = k * sigma;
        let b = band_at(p, &ou, &costs, DEFAULT_TOL)?;
        let down = solve_p2(p, &ou, &costs, DEFAULT_TOL)?;
        let up = solve_p1(p, &ou, &costs, DEFAULT_TOL)?;
        println!(
            "{k:>8.1} {:>10.5} {:>10.5} {:>10.5} {:>10.5}",
            b.lower, b.upper, down.p2, up.p1
        );
    }

    // zero cost: the band collapses onto p
    let free = CostParams::new(0.0)?;
    let b = band_at(0.03, &ou, &free, DEFAULT_TOL)?;
    println!("gamma = 0 at p = 0.03: [{}, {}]", b.lower, b.upper);
    Ok(())
}
