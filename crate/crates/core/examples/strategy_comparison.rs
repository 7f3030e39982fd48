// Generate a synthetic system, apply a strategy that adds coupled processes,
// and compare the two operating modes.

use integral_indicators::{generate_synthetic, run_comparison, IndicatorConfig, Result, SyntheticSpec, WindowSpec};

pub fn run() -> Result<f64> {
    let spec = SyntheticSpec {
        n_base: 40,
        seed: 11,
        ..SyntheticSpec::default()
    };
    let (base, strategy) = generate_synthetic(&spec)?;
    println!(
        "base: {} parameters over {} periods; strategy `{}` adds {}",
        base.n(),
        base.t_max(),
        strategy.id,
        strategy.added_parameters.len()
    );
    let cmp = run_comparison(&base, &strategy, WindowSpec::default(), &IndicatorConfig::default())?;
    println!("G_base     = {}", cmp.base.g_total());
    println!("G_strategy = {}", cmp.strategy.g_total());
    println!("delta G    = {}", cmp.result.delta_total);
    Ok(cmp.result.delta_total)
}

fn main() -> Result<()> {
    run().map(|_| ())
}
