//! Randomized invariant checks, shared by the property tests and the
//! acceptance run. Each check runs `cases` generated inputs and returns the
//! shrunk counterexample on failure.
#![allow(dead_code)]

use super::{max_abs_diff, seeded, transpose};
use integral_indicators::correlation::correlation_of_window;
use integral_indicators::{
    apply_strategy, compare_strategies, correlation_at, express_indicator, indicator_rows_blocked, indicator_series,
    window_slice, CorrelationConfig, CorrelationMatrix, CorrelationMode, Dataset, Evaluation, IndicatorConfig,
    IndicatorSeries, ParameterMeta, ParameterSpace, RollingMoments, Strategy as ControlStrategy, WindowSpec,
};
use proptest::prelude::*;
use proptest::test_runner::{Config, TestCaseError, TestRunner};

pub const KS: [usize; 4] = [2, 3, 6, 12];

type Check = std::result::Result<(), TestCaseError>;

fn run<S: Strategy>(cases: u32, strategy: S, test: impl Fn(S::Value) -> Check) -> Result<(), String> {
    let mut runner = TestRunner::new(Config {
        cases,
        failure_persistence: None,
        ..Config::default()
    });
    runner.run(&strategy, test).map_err(|e| e.to_string())
}

fn column(t_max: usize) -> impl Strategy<Value = Vec<f64>> {
    prop_oneof![
        8 => (-1e3..1e3f64, -3.0..3.0f64, prop::collection::vec(-1.0..1.0f64, t_max))
            .prop_map(|(offset, e, u)| u.into_iter().map(|v| offset + 10f64.powf(e) * v).collect()),
        1 => (-5.0..5.0f64).prop_map(move |c| vec![c; t_max]),
    ]
}

/// `(k, dataset)` with `t_max ≥ k + 1`; columns mix offsets, scales and constants.
pub fn dataset(max_n: usize, max_extra_t: usize) -> impl Strategy<Value = (usize, Dataset)> {
    (prop::sample::select(KS.to_vec()), 1..=max_n, 1..=max_extra_t).prop_flat_map(|(k, n, extra)| {
        let t_max = k + extra;
        prop::collection::vec(column(t_max), n)
            .prop_map(move |cols| (k, Dataset::unlabeled(&transpose(&cols)).unwrap()))
    })
}

/// Columns `scale·(o + u)` with `|o| < 10`, so the data are well conditioned.
pub fn well_conditioned(max_n: usize, max_extra_t: usize) -> impl Strategy<Value = (usize, Dataset)> {
    (prop::sample::select(KS.to_vec()), 1..=max_n, 1..=max_extra_t).prop_flat_map(|(k, n, extra)| {
        let t_max = k + extra;
        let col = (-10.0..10.0f64, -3.0..3.0f64, prop::collection::vec(-1.0..1.0f64, t_max)).prop_map(|(o, e, u)| {
            let scale = 10f64.powf(e);
            u.into_iter().map(|v| scale * (o + v)).collect::<Vec<f64>>()
        });
        prop::collection::vec(col, n).prop_map(move |cols| (k, Dataset::unlabeled(&transpose(&cols)).unwrap()))
    })
}

pub fn mode() -> impl Strategy<Value = CorrelationMode> {
    prop_oneof![Just(CorrelationMode::Pearson), Just(CorrelationMode::RawMoment)]
}

fn series(ds: &Dataset, k: usize, config: &IndicatorConfig) -> IndicatorSeries {
    indicator_series(ds, WindowSpec::new(k).unwrap(), config).unwrap()
}

pub fn symmetry(cases: u32) -> Result<(), String> {
    run(
        cases,
        (dataset(12, 20), mode(), any::<prop::sample::Index>()),
        |((k, ds), mode, pick)| {
            let t = k + 1 + pick.index(ds.t_max() - k);
            let config = CorrelationConfig {
                mode,
                ..Default::default()
            };
            let m = correlation_at(&ds, t, WindowSpec::new(k).unwrap(), &config).unwrap();
            for i in 0..m.n() {
                for j in 0..m.n() {
                    prop_assert_eq!(m.get(i, j).to_bits(), m.get(j, i).to_bits());
                }
            }
            Ok(())
        },
    )
}

pub fn pearson_bound(cases: u32) -> Result<(), String> {
    run(cases, dataset(12, 20), |(k, ds)| {
        let spec = WindowSpec::new(k).unwrap();
        for t in k + 1..=ds.t_max() {
            let m = correlation_at(&ds, t, spec, &CorrelationConfig::pearson()).unwrap();
            for i in 0..m.n() {
                let diag = if m.is_active(i) { 1.0 } else { 0.0 };
                prop_assert_eq!(m.get(i, i), diag);
                for j in 0..m.n() {
                    prop_assert!(m.get(i, j).abs() <= 1.0 + 1e-12);
                }
            }
        }
        Ok(())
    })
}

/// Both columns keep their activity under scaling; the variance threshold is absolute.
fn same_activity(a: &CorrelationMatrix, b: &CorrelationMatrix, i: usize, j: usize) -> bool {
    a.is_active(i) == b.is_active(i) && a.is_active(j) == b.is_active(j)
}

type Matrices = (
    CorrelationMatrix,
    CorrelationMatrix,
    CorrelationMatrix,
    CorrelationMatrix,
);

fn scaled_pair(ds: &Dataset, k: usize, factors: &[f64]) -> Matrices {
    let spec = WindowSpec::new(k).unwrap();
    let t = ds.t_max();
    let cols: Vec<Vec<f64>> = (0..ds.n())
        .map(|i| ds.column(i).iter().map(|v| v * factors[i]).collect())
        .collect();
    let scaled = Dataset::unlabeled(&transpose(&cols)).unwrap();
    let at = |d: &Dataset, c: CorrelationConfig| correlation_at(d, t, spec, &c).unwrap();
    (
        at(ds, CorrelationConfig::pearson()),
        at(&scaled, CorrelationConfig::pearson()),
        at(ds, CorrelationConfig::raw_moment()),
        at(&scaled, CorrelationConfig::raw_moment()),
    )
}

/// Power-of-two factors scale every value exactly, so entries must agree bit for bit.
pub fn scale_invariance_exact(cases: u32) -> Result<(), String> {
    run(
        cases,
        (dataset(8, 10), prop::collection::vec(-20i32..20, 8)),
        |((k, ds), exps)| {
            let factors: Vec<f64> = exps.iter().map(|&e| 2f64.powi(e)).collect();
            let (a, b, raw_a, raw_b) = scaled_pair(&ds, k, &factors);
            for i in 0..ds.n() {
                for j in 0..ds.n() {
                    if same_activity(&a, &b, i, j) {
                        prop_assert_eq!(a.get(i, j), b.get(i, j));
                    }
                    // the raw moment scales with the factors instead
                    prop_assert_eq!(raw_b.get(i, j), raw_a.get(i, j) * factors[i] * factors[j]);
                }
            }
            Ok(())
        },
    )
}

pub fn scale_invariance(cases: u32) -> Result<(), String> {
    run(
        cases,
        (well_conditioned(8, 10), prop::collection::vec(-3.0..3.0f64, 8)),
        |((k, ds), logs)| {
            let factors: Vec<f64> = logs.iter().map(|e| 10f64.powf(*e)).collect();
            let (a, b, raw_a, raw_b) = scaled_pair(&ds, k, &factors);
            for i in 0..ds.n() {
                for j in 0..ds.n() {
                    let (x, y) = (a.get(i, j), b.get(i, j));
                    prop_assert!(
                        !same_activity(&a, &b, i, j) || (x - y).abs() <= 1e-12,
                        "({i},{j}) {x} vs {y}"
                    );
                    let expected = raw_a.get(i, j) * factors[i] * factors[j];
                    prop_assert!((raw_b.get(i, j) - expected).abs() <= 1e-12 * expected.abs());
                }
            }
            Ok(())
        },
    )
}

pub fn inactive_contributes_nothing(cases: u32) -> Result<(), String> {
    run(cases, (dataset(10, 15), -1e3..1e3f64), |((k, ds), c)| {
        let strategy = ControlStrategy::new("flat").add_parameter(
            ParameterMeta::new("flat", "constant", ParameterSpace::Control, ""),
            vec![c; ds.t_max()],
        );
        let with_flat = apply_strategy(&ds, &strategy).unwrap();
        let config = IndicatorConfig::default();
        let (a, b) = (series(&ds, k, &config), series(&with_flat, k, &config));
        for (step, (ra, rb)) in a.g_rows().iter().zip(b.g_rows()).enumerate() {
            prop_assert_eq!(rb[ds.n()], 0.0);
            prop_assert!(max_abs_diff(ra, &rb[..ds.n()]) <= 1e-12);
            prop_assert_eq!(b.inactive_counts()[step], a.inactive_counts()[step] + 1);
        }
        prop_assert!((a.g_total() - b.g_total()).abs() <= 1e-12 * a.g_total().max(1.0));
        Ok(())
    })
}

pub fn delta_antisymmetry(cases: u32) -> Result<(), String> {
    run(
        cases,
        (dataset(8, 15), 0.1..10.0f64, mode()),
        |((k, ds), scale, mode)| {
            let strategy = ControlStrategy::new("s")
                .scale("x1", scale)
                .override_value("x1", ds.t_max(), 42.0);
            let alt = apply_strategy(&ds, &strategy).unwrap();
            let config = IndicatorConfig::with_mode(mode);
            let (a, b) = (series(&ds, k, &config), series(&alt, k, &config));
            let ab = compare_strategies(&a, &b).unwrap();
            let ba = compare_strategies(&b, &a).unwrap();
            prop_assert_eq!(ab.delta_total, -ba.delta_total);
            prop_assert!(ab.delta_step.iter().zip(&ba.delta_step).all(|(x, y)| *x == -*y));
            prop_assert_eq!(compare_strategies(&a, &a).unwrap().delta_total, 0.0);
            Ok(())
        },
    )
}

pub fn permutation_invariance(cases: u32) -> Result<(), String> {
    run(cases, (dataset(10, 15), any::<u64>()), |((k, ds), seed)| {
        use rand::seq::SliceRandom;
        let mut order: Vec<usize> = (0..ds.n()).collect();
        order.shuffle(&mut seeded(seed));
        let cols: Vec<Vec<f64>> = order.iter().map(|&i| ds.column(i).to_vec()).collect();
        let permuted = Dataset::unlabeled(&transpose(&cols)).unwrap();
        let config = IndicatorConfig::default();
        let (a, b) = (series(&ds, k, &config), series(&permuted, k, &config));
        prop_assert!((a.g_total() - b.g_total()).abs() <= 1e-9 * a.g_total().max(1.0));
        for (ra, rb) in a.g_rows().iter().zip(b.g_rows()) {
            for (pos, &i) in order.iter().enumerate() {
                prop_assert!((ra[i] - rb[pos]).abs() <= 1e-9 * ra[i].max(1.0));
            }
        }
        Ok(())
    })
}

/// Every route gives bit-identical results on rerun, whatever the worker count.
pub fn determinism(cases: u32) -> Result<(), String> {
    let pool = rayon::ThreadPoolBuilder::new().num_threads(3).build().unwrap();
    run(cases, (dataset(12, 15), mode()), |((k, ds), mode)| {
        for evaluation in [Evaluation::Rolling, Evaluation::Recompute, Evaluation::FullMatrix] {
            let config = IndicatorConfig::with_mode(mode).with_evaluation(evaluation);
            let first = series(&ds, k, &config);
            let second = pool.install(|| series(&ds, k, &config));
            prop_assert_eq!(first.g_total().to_bits(), second.g_total().to_bits());
            prop_assert_eq!(first, second);
        }
        Ok(())
    })
}

pub fn adding_never_lowers_g(cases: u32) -> Result<(), String> {
    let input = (
        dataset(8, 15),
        any::<prop::sample::Index>(),
        prop::collection::vec(-1.0..1.0f64, 30),
    );
    run(cases, input, |((k, ds), src, noise)| {
        let i = src.index(ds.n());
        let values: Vec<f64> = ds
            .column(i)
            .iter()
            .zip(noise.iter().cycle())
            .map(|(v, e)| v + e)
            .collect();
        let extra = ParameterMeta::new("extra", "extra", ParameterSpace::Control, "");
        let alt = apply_strategy(&ds, &ControlStrategy::new("more").add_parameter(extra, values)).unwrap();
        let config = IndicatorConfig::default();
        let result = compare_strategies(&series(&ds, k, &config), &series(&alt, k, &config)).unwrap();
        prop_assert!(result.delta_step.iter().all(|d| *d <= 1e-9));
        Ok(())
    })
}

pub fn apply_strategy_is_pure(cases: u32) -> Result<(), String> {
    run(
        cases,
        (dataset(6, 10), 0.1..10.0f64, -1e3..1e3f64),
        |((_, ds), factor, v)| {
            let snapshot = ds.clone();
            let strategy = ControlStrategy::new("s").scale("x1", factor).override_value("x1", 1, v);
            let alt = apply_strategy(&ds, &strategy).unwrap();
            prop_assert_eq!(&ds, &snapshot);
            prop_assert_eq!(alt.value(1, 0), v);
            prop_assert_eq!(apply_strategy(&ds, &ControlStrategy::new("noop")).unwrap(), snapshot);
            Ok(())
        },
    )
}

/// Rolling correlations equal fresh batch ones at every step, for data up to 500 × 50.
pub fn rolling_matches_batch(cases: u32) -> Result<(), String> {
    let reinit = prop_oneof![Just(0usize), 1..300usize];
    run(cases, (dataset(50, 500), mode(), reinit), |((k, ds), mode, reinit)| {
        let spec = WindowSpec::new(k).unwrap();
        let config = CorrelationConfig {
            mode,
            ..Default::default()
        };
        let mut rolling = RollingMoments::init(&ds, spec, reinit).unwrap();
        loop {
            let window = window_slice(&ds, rolling.t(), spec).unwrap();
            let batch = correlation_of_window(&window, &config);
            let incremental = rolling.correlation(&config);
            let tol = match mode {
                CorrelationMode::Pearson => 1e-9,
                CorrelationMode::RawMoment => 1e-9 * batch.entries().iter().fold(1.0_f64, |m, v| m.max(v.abs())),
            };
            prop_assert!(
                max_abs_diff(batch.entries(), incremental.entries()) <= tol,
                "t = {}",
                rolling.t()
            );
            if rolling.t() == ds.t_max() {
                return Ok(());
            }
            rolling.advance(&ds).unwrap();
        }
    })
}

pub fn blocked_matches_full(cases: u32) -> Result<(), String> {
    run(cases, (dataset(40, 5), mode(), 2..40usize), |((k, ds), mode, bs)| {
        let spec = WindowSpec::new(k).unwrap();
        let config = CorrelationConfig {
            mode,
            ..Default::default()
        };
        let t = ds.t_max();
        let full = express_indicator(&correlation_at(&ds, t, spec, &config).unwrap());
        let scale = full.iter().fold(1.0_f64, |m, v| m.max(v.abs()));
        for block in [1, 7, bs, ds.n()] {
            let rows = indicator_rows_blocked(&ds, t, spec, &config, block).unwrap();
            prop_assert!(max_abs_diff(&rows, &full) <= 1e-10 * scale, "block {block}");
        }
        Ok(())
    })
}

/// The invariant suite gated by the acceptance run, with its minimum case count.
pub type Invariant = fn(u32) -> Result<(), String>;

pub fn suite() -> Vec<(&'static str, Invariant)> {
    vec![
        ("symmetry", symmetry),
        ("pearson bound", pearson_bound),
        ("scale invariance (exact factors)", scale_invariance_exact),
        ("scale invariance", scale_invariance),
        ("inactive column contributes nothing", inactive_contributes_nothing),
        ("delta antisymmetry", delta_antisymmetry),
        ("permutation invariance", permutation_invariance),
        ("determinism", determinism),
    ]
}
