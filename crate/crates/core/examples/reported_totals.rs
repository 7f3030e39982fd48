// Compare two strategies from their reported whole-run totals alone.

use integral_indicators::{compare_strategies, CorrelationMode, IndicatorSeries, Result};

pub fn run() -> Result<Vec<f64>> {
    let pairs = [
        ("basic vs fire safety", 1_229_156.0, 1_248_571.0),
        ("basic vs alternative", 153_080.0, 155_896.0),
    ];
    let mut deltas = Vec::new();
    for (name, g1, g2) in pairs {
        let a = IndicatorSeries::from_step_totals(6, CorrelationMode::Pearson, 7, vec![g1]);
        let b = IndicatorSeries::from_step_totals(6, CorrelationMode::Pearson, 7, vec![g2]);
        let result = compare_strategies(&a, &b)?;
        println!("{name}: {g1} - {g2} = {}", result.delta_total);
        deltas.push(result.delta_total);
    }
    Ok(deltas)
}

fn main() -> Result<()> {
    run().map(|_| ())
}
