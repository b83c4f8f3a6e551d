//! Exit probability, gain and risk between two edges, with the residuals of
//! their backward equations and the boundary values.

use notrade_band::band::{boundary_values, kolmogorov_residuals, solve_p2, ExitFunctions, DEFAULT_TOL};
use notrade_band::ou::{CostParams, OuParams};

fn main() -> notrade_band::Result<()> {
    let ou = OuParams::new(0.01, 0.01)?;
    let costs = CostParams::from_ratio(&ou, 0.1)?;
    let pair = solve_p2(0.05, &ou, &costs, DEFAULT_TOL)?;
    println!("p1 = {:.6}, p2 = {:.6}", pair.p1, pair.p2);

    let ex = ExitFunctions::new(&pair, &ou)?;
    println!("{:>10} {:>10} {:>10} {:>10} {:>10}", "p", "P(p2)", "gain", "risk", "residual");
    for k in 1..10 {
        let p = pair.p2 + (pair.p1 - pair.p2) * k as f64 / 10.0;
        let r = kolmogorov_residuals(p, &pair, &ou)?;
        println!(
            "{p:>10.5} {:>10.5} {:>10.4} {:>10.4} {:>10.2e}",
            ex.probability(p)?,
            ex.gain(p)?,
            ex.risk(p)?,
            r.max_abs()
        );
    }
    let [at1, at2] = boundary_values(&pair, &ou)?;
    println!("at p1: {at1:?}");
    println!("at p2: {at2:?}");
    Ok(())
}
