//! Sample paths of the predictor and their stationary statistics.

use notrade_band::ou::{sample_path, stationary_std, OuParams};

fn main() -> notrade_band::Result<()> {
    let ou = OuParams::new(0.01, 0.01)?;
    let sigma = stationary_std(&ou);
    let path = sample_path(&ou, 0.0, 1_000_000, 7)?;
    let x = &path.values[10_000..];
    let n = x.len() as f64;
    let mean = x.iter().sum::<f64>() / n;
    let var = x.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    println!("sigma_p = {sigma:.5}, sample std = {:.5}, mean = {mean:.5}", var.sqrt());
    for lag in [1, 10, 100] {
        let c = x.windows(lag + 1).map(|w| (w[0] - mean) * (w[lag] - mean)).sum::<f64>() / (n - lag as f64);
        println!("lag {lag:>3}: autocorrelation {:.4}, (1 - eps)^lag = {:.4}", c / var, (1.0 - ou.epsilon()).powi(lag as i32));
    }
    println!("first values: {:?}", &path.values[..5]);
    Ok(())
}
