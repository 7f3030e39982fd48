// Row sums of |r| for a wide table without materializing the n x n matrix.

use integral_indicators::bench::random_dataset;
use integral_indicators::{
    correlation_at, express_indicator, indicator_rows_blocked, CorrelationConfig, Result, WindowSpec,
};

pub fn run() -> Result<f64> {
    let ds = random_dataset(40, 300, 7);
    let spec = WindowSpec::default();
    let config = CorrelationConfig::pearson();
    let t = 20;

    let full = express_indicator(&correlation_at(&ds, t, spec, &config)?);
    let mut worst = 0.0_f64;
    for block_size in [1, 16, 64, 300] {
        let rows = indicator_rows_blocked(&ds, t, spec, &config, block_size)?;
        let diff = rows.iter().zip(&full).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        println!(
            "block size {block_size:>3}: G(t) = {:.6}, max diff vs full = {diff:e}",
            rows.iter().sum::<f64>()
        );
        worst = worst.max(diff);
    }
    Ok(worst)
}

fn main() -> Result<()> {
    run().map(|_| ())
}
