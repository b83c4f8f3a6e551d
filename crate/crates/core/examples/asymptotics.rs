//! The solver against its limiting laws: small cost, large cost, large p and
//! the discrete-time saturation at 2 gamma.

use notrade_band::band::{
    asymptotic_discrete_band, asymptotic_large_gamma_width, asymptotic_large_p,
    asymptotic_large_p_refined, asymptotic_small_p, band_at, DEFAULT_TOL,
};
use notrade_band::ou::{continuous_std, CostParams, OuParams};

fn main() -> notrade_band::Result<()> {
    let ou = OuParams::new(0.01, 0.01)?;
    let sigma = continuous_std(&ou);

    println!("small cost, upper edge at p = 0");
    for r in [1e-2, 1e-3, 1e-4, 1e-5] {
        let c = CostParams::from_ratio(&ou, r)?;
        let u = band_at(0.0, &ou, &c, DEFAULT_TOL)?.upper;
        println!("  ratio {r:e}: {u:.6e} vs (3 gamma beta^2 / 2)^(1/3) = {:.6e}", asymptotic_small_p(&c, &ou));
    }

    println!("large cost, width at p = 0 (limit {:.6})", asymptotic_large_gamma_width(&ou));
    for r in [1.0, 5.0, 20.0] {
        let c = CostParams::from_ratio(&ou, r)?;
        println!("  ratio {r}: {:.6}", band_at(0.0, &ou, &c, DEFAULT_TOL)?.width());
    }

    println!("large p at ratio 0.5, distance of the lower edge below p");
    let c = CostParams::from_ratio(&ou, 0.5)?;
    for k in [5.0, 10.0, 20.0] {
        let p = k * sigma;
        let b = band_at(p, &ou, &c, DEFAULT_TOL)?;
        let (_, two) = asymptotic_large_p(p, &c, &ou);
        let (_, four) = asymptotic_large_p_refined(p, &c, &ou);
        println!(
            "  {k} sigma: {:.5}; sqrt(2 gamma eps p) = {:.5}, sqrt(4 gamma eps p) = {:.5}",
            p - b.lower,
            p - two,
            p - four
        );
    }

    let c = CostParams::new(0.2)?;
    println!("discrete regime limit for gamma = 0.2: width {}", asymptotic_discrete_band(&c));
    Ok(())
}
