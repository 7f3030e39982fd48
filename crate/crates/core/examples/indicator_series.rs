// Indicator dynamics G(t) and the whole-run state G for one dataset, using
// each evaluation route.

use integral_indicators::bench::random_dataset;
use integral_indicators::{indicator_series, Evaluation, IndicatorConfig, IndicatorSeries, Result, WindowSpec};

pub fn run() -> Result<Vec<IndicatorSeries>> {
    let ds = random_dataset(30, 12, 3);
    let spec = WindowSpec::default();
    let mut out = Vec::new();
    for evaluation in [Evaluation::Rolling, Evaluation::Recompute, Evaluation::FullMatrix] {
        let series = indicator_series(&ds, spec, &IndicatorConfig::default().with_evaluation(evaluation))?;
        println!("{evaluation:?}: G = {}", series.g_total());
        out.push(series);
    }
    let s = &out[0];
    for (t, g) in s.times().zip(s.g_step()).take(5) {
        println!("  G({t}) = {g:.6}");
    }
    Ok(out)
}

fn main() -> Result<()> {
    run().map(|_| ())
}
