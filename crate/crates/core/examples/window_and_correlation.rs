// Slice one window out of a small table and inspect its correlation matrix
// under both estimators.

use integral_indicators::correlation::correlation_of_window;
use integral_indicators::{
    express_indicator, window_slice, CorrelationConfig, CorrelationMatrix, Dataset, Result, WindowSpec,
};

pub fn run() -> Result<(CorrelationMatrix, CorrelationMatrix)> {
    // x1 rises, x2 falls, x3 is flat: r12 = -1 and x3 is inactive.
    let rows: Vec<Vec<f64>> = (1..=8).map(|t| vec![t as f64, 10.0 - 2.0 * t as f64, 4.0]).collect();
    let ds = Dataset::unlabeled(&rows)?;
    let spec = WindowSpec::new(3)?;

    let window = window_slice(&ds, 5, spec)?;
    println!("window at t = {} (newest first): {:?}", window.t(), window.rows());

    let pearson = correlation_of_window(&window, &CorrelationConfig::pearson());
    let raw = correlation_of_window(&window, &CorrelationConfig::raw_moment());
    for (name, m) in [("pearson", &pearson), ("raw-moment", &raw)] {
        println!("{name}:");
        for i in 0..m.n() {
            println!("  {:?}", m.row(i));
        }
        println!("  G_i = {:?}, inactive = {}", express_indicator(m), m.inactive_count());
    }
    Ok((pearson, raw))
}

fn main() -> Result<()> {
    run().map(|_| ())
}
