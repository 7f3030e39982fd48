// Slide the rolling moment sums through a dataset and check them against a
// fresh batch computation at every step.

use integral_indicators::{correlation_at, CorrelationConfig, Dataset, Result, RollingMoments, WindowSpec};

pub fn run() -> Result<f64> {
    let rows: Vec<Vec<f64>> = (0..200)
        .map(|t| {
            let t = t as f64;
            vec![1e6 + (0.3 * t).sin(), (0.17 * t).cos() * 1e-3, t * t, (t * 0.05).exp()]
        })
        .collect();
    let ds = Dataset::unlabeled(&rows)?;
    let spec = WindowSpec::new(6)?;
    let config = CorrelationConfig::pearson();

    let mut rolling = RollingMoments::init(&ds, spec, 64)?;
    let mut worst = 0.0_f64;
    loop {
        let batch = correlation_at(&ds, rolling.t(), spec, &config)?;
        let incremental = rolling.correlation(&config);
        let diff = batch
            .entries()
            .iter()
            .zip(incremental.entries())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        worst = worst.max(diff);
        if rolling.t() == ds.t_max() {
            break;
        }
        rolling.advance(&ds)?;
    }
    println!(
        "steps through t = {}, recenterings = {}",
        rolling.t(),
        rolling.recenter_count()
    );
    println!("largest |rolling - batch| entry difference: {worst:e}");
    Ok(worst)
}

fn main() -> Result<()> {
    run().map(|_| ())
}
