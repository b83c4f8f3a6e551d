//! Optimal band against the grid-searched constant band over the six cost
//! ratios, with 100 paths of 50000 steps. Pass a smaller path count as the
//! first argument for a quick run.

use notrade_band::ou::{CostParams, OuParams};
use notrade_band::cli::DEFAULT_SEED;
use notrade_band::sim::compare;

fn main() -> notrade_band::Result<()> {
    let n_paths = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(100);
    let ou = OuParams::new(0.01, 0.01)?;
    println!("{:>6} {:>16} {:>16} {:>10} {:>16}", "ratio", "optimal", "grid search", "width", "paired diff");
    for ratio in [0.01, 0.1, 0.15, 0.2, 0.3, 0.5] {
        let costs = CostParams::from_ratio(&ou, ratio)?;
        let row = compare(&ou, &costs, n_paths, 50_000, DEFAULT_SEED)?;
        println!(
            "{ratio:>6} {:>9.2} ({:.2}) {:>9.2} ({:.2}) {:>10.4} {:>9.2} ({:.2})",
            row.optimal.mean_pnl,
            row.optimal.stderr,
            row.grid.mean_pnl,
            row.grid.stderr,
            row.grid_width,
            row.paired_difference,
            row.paired_stderr
        );
    }
    Ok(())
}
