//! Band curves rescaled by the stationary deviation for several cost ratios.
//! The rescaled columns only depend on the ratio.

use notrade_band::band::{band_curve, DEFAULT_TOL};
use notrade_band::ou::{continuous_std, CostParams, OuParams};

fn main() -> notrade_band::Result<()> {
    let ratios = [0.01, 0.1, 0.5, 2.0];
    let ou = OuParams::new(0.01, 0.01)?;
    let sigma = continuous_std(&ou);
    let grid: Vec<f64> = (-8..=8).map(|k| k as f64 * 0.5 * sigma).collect();

    let curves = ratios
        .iter()
        .map(|&r| band_curve(&grid, &ou, &CostParams::from_ratio(&ou, r)?, DEFAULT_TOL))
        .collect::<notrade_band::Result<Vec<_>>>()?;

    print!("{:>8}", "p/sigma");
    for r in ratios {
        print!(" {:>17}", format!("ratio {r}"));
    }
    println!();
    for (i, &p) in grid.iter().enumerate() {
        print!("{:>8.1}", p / sigma);
        for c in &curves {
            let b = c.points[i];
            print!(" {:>8.3} {:>8.3}", b.lower / sigma, b.upper / sigma);
        }
        println!();
    }

    // same ratio, other parameters
    let other = OuParams::new(0.04, 0.02)?;
    let s2 = continuous_std(&other);
    let c = band_curve(&[s2], &other, &CostParams::from_ratio(&other, 0.1)?, DEFAULT_TOL)?;
    let b = c.points[0];
    println!(
        "eps = 0.04, beta = 0.02, ratio 0.1 at p = sigma: [{:.3}, {:.3}] sigma",
        b.lower / s2,
        b.upper / s2
    );
    Ok(())
}
