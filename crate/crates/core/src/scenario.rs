//! Operating strategies as transformations of a base dataset, and a seeded
//! generator of synthetic systems for experiments without enterprise data.
//!
//! # Synthetic construction
//!
//! [`generate_synthetic`] draws everything from one `ChaCha8Rng` seeded with
//! `seed_from_u64(spec.seed)`; normals come from `rand_distr::StandardNormal`
//! (ziggurat). Draw order:
//!
//! 1. factor `f(t) ~ N(0, 1)` for `t = 1 … t_max`;
//! 2. for each base column `i`: `level_i ~ U[1000, 10000)`, `scale_i ~ U[10, 100)`,
//!    then noise `e_i(t) ~ N(0, 1)` for every `t`. The standardized column is
//!    `z_i = √ρ·f + √(1−ρ)·e_i` (so pairwise correlation is `ρ = base_correlation`)
//!    and the stored value is `level_i + scale_i·z_i`;
//! 3. for each added column `m`: `sources_per_added` distinct base columns
//!    (`rand::seq::index::sample`), a weight `w_s ~ U[0.5, 1.5)` per source, noise
//!    `u_m(t) ~ N(0, 1)`, then `level_m` and `scale_m` as above. The mixture
//!    `mix = Σ w_s z_s / sd(Σ w_s z_s)` has unit variance and the added column is
//!    `level_m + scale_m·(c·mix + (1 − c)·u_m)` with `c = coupling`.
//!
//! Base columns are tagged `Actual` (first 80 %) or `Environment`; added
//! columns are tagged `Control`.

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::indicators::{compare_strategies, indicator_series, ComparisonResult, IndicatorConfig, IndicatorSeries};
use crate::model::{Dataset, ParameterMeta, ParameterSpace, WindowSpec};

pub const RNG_DESCRIPTION: &str = "ChaCha8Rng (rand_chacha 0.9, seed_from_u64) + rand_distr 0.5 StandardNormal";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AddedParameter {
    pub meta: ParameterMeta,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Override {
    pub parameter: String,
    pub t: usize,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScaleFactor {
    pub parameter: String,
    pub factor: f64,
}

/// A named management scenario: extra parameter series plus edits to the base.
///
/// Scale factors are applied first, then point overrides, then the added
/// columns are appended after the base columns.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Strategy {
    pub id: String,
    #[serde(default)]
    pub added_parameters: Vec<AddedParameter>,
    #[serde(default)]
    pub overrides: Vec<Override>,
    #[serde(default)]
    pub scale_factors: Vec<ScaleFactor>,
}

impl Strategy {
    pub fn new(id: impl Into<String>) -> Self {
        Strategy {
            id: id.into(),
            ..Default::default()
        }
    }

    pub fn add_parameter(mut self, meta: ParameterMeta, values: Vec<f64>) -> Self {
        self.added_parameters.push(AddedParameter { meta, values });
        self
    }

    pub fn override_value(mut self, parameter: impl Into<String>, t: usize, value: f64) -> Self {
        self.overrides.push(Override {
            parameter: parameter.into(),
            t,
            value,
        });
        self
    }

    pub fn scale(mut self, parameter: impl Into<String>, factor: f64) -> Self {
        self.scale_factors.push(ScaleFactor {
            parameter: parameter.into(),
            factor,
        });
        self
    }

    pub fn is_empty(&self) -> bool {
        self.added_parameters.is_empty() && self.overrides.is_empty() && self.scale_factors.is_empty()
    }
}

/// Returns the dataset the strategy describes; `base` is left untouched.
pub fn apply_strategy(base: &Dataset, strategy: &Strategy) -> Result<Dataset> {
    let t_max = base.t_max();
    let (mut meta, _, mut values) = base.clone().into_parts();

    for s in &strategy.scale_factors {
        let i = base
            .position(&s.parameter)
            .ok_or_else(|| Error::UnknownParameter(s.parameter.clone()))?;
        if !(s.factor.is_finite() && s.factor > 0.0) {
            return Err(Error::Schema(format!(
                "scale factor for `{}` must be positive, got {}",
                s.parameter, s.factor
            )));
        }
        values[i * t_max..(i + 1) * t_max]
            .iter_mut()
            .for_each(|v| *v *= s.factor);
    }
    for o in &strategy.overrides {
        let i = base
            .position(&o.parameter)
            .ok_or_else(|| Error::UnknownParameter(o.parameter.clone()))?;
        if !(1..=t_max).contains(&o.t) {
            return Err(Error::OutOfRange {
                t: o.t,
                first: 1,
                last: t_max,
            });
        }
        values[i * t_max + o.t - 1] = o.value;
    }
    for added in &strategy.added_parameters {
        if added.values.len() != t_max {
            return Err(Error::LengthMismatch {
                id: added.meta.id.clone(),
                expected: t_max,
                actual: added.values.len(),
            });
        }
        meta.push(added.meta.clone());
        values.extend_from_slice(&added.values);
    }
    Dataset::from_column_major(meta, t_max, values)
}

fn default_sources() -> usize {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntheticSpec {
    pub n_base: usize,
    pub t_max: usize,
    pub seed: u64,
    /// Target pairwise correlation of the base columns, in `[0, 1)`.
    pub base_correlation: f64,
    pub coupled_count: usize,
    /// Weight of the base mixture in each added column, in `[0, 1]`.
    pub coupling: f64,
    #[serde(default = "default_sources")]
    pub sources_per_added: usize,
}

impl Default for SyntheticSpec {
    fn default() -> Self {
        SyntheticSpec {
            n_base: 200,
            t_max: 60,
            seed: 0,
            base_correlation: 0.3,
            coupled_count: 5,
            coupling: 0.9,
            sources_per_added: 1,
        }
    }
}

impl SyntheticSpec {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidSpec(msg));
        if self.n_base == 0 {
            return bad("n_base must be positive".into());
        }
        if self.t_max < 2 {
            return bad(format!("t_max must be at least 2, got {}", self.t_max));
        }
        if !(0.0..1.0).contains(&self.base_correlation) {
            return bad(format!(
                "base_correlation must be in [0, 1), got {}",
                self.base_correlation
            ));
        }
        if !(0.0..=1.0).contains(&self.coupling) {
            return bad(format!("coupling must be in [0, 1], got {}", self.coupling));
        }
        if self.sources_per_added == 0 || self.sources_per_added > self.n_base {
            return bad(format!(
                "sources_per_added must be in [1, n_base = {}], got {}",
                self.n_base, self.sources_per_added
            ));
        }
        Ok(())
    }
}

fn normal_series(rng: &mut ChaCha8Rng, len: usize) -> Vec<f64> {
    (0..len).map(|_| rng.sample(StandardNormal)).collect()
}

fn level_and_scale(rng: &mut ChaCha8Rng) -> (f64, f64) {
    let level = rng.random_range(1_000.0..10_000.0);
    let scale = rng.random_range(10.0..100.0);
    (level, scale)
}

/// Seeded base system plus a strategy adding `coupled_count` control parameters.
pub fn generate_synthetic(spec: &SyntheticSpec) -> Result<(Dataset, Strategy)> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let t_max = spec.t_max;
    let rho = spec.base_correlation;
    let (load, idio) = (rho.sqrt(), (1.0 - rho).sqrt());

    let factor = normal_series(&mut rng, t_max);
    let actual_cut = (spec.n_base * 4).div_ceil(5);
    let mut standardized = Vec::with_capacity(spec.n_base);
    let mut meta = Vec::with_capacity(spec.n_base);
    let mut columns = Vec::with_capacity(spec.n_base);
    for i in 0..spec.n_base {
        let (level, scale) = level_and_scale(&mut rng);
        let noise = normal_series(&mut rng, t_max);
        let z: Vec<f64> = factor.iter().zip(&noise).map(|(f, e)| load * f + idio * e).collect();
        columns.push(z.iter().map(|v| level + scale * v).collect::<Vec<f64>>());
        standardized.push(z);
        let space = if i < actual_cut {
            ParameterSpace::Actual
        } else {
            ParameterSpace::Environment
        };
        meta.push(ParameterMeta::new(
            format!("x{:04}", i + 1),
            format!("base parameter {}", i + 1),
            space,
            "currency",
        ));
    }
    let base = Dataset::from_columns(meta, columns)?;

    let mut strategy = Strategy::new(format!("synthetic-coupled-{}", spec.seed));
    let c = spec.coupling;
    for m in 0..spec.coupled_count {
        let sources = index::sample(&mut rng, spec.n_base, spec.sources_per_added).into_vec();
        let weights: Vec<f64> = sources.iter().map(|_| rng.random_range(0.5..1.5)).collect();
        let noise = normal_series(&mut rng, t_max);
        let (level, scale) = level_and_scale(&mut rng);

        let w_sum: f64 = weights.iter().sum();
        let w_sq: f64 = weights.iter().map(|w| w * w).sum();
        let mix_sd = (w_sq * (1.0 - rho) + w_sum * w_sum * rho).sqrt();
        let values = (0..t_max)
            .map(|t| {
                let mix: f64 = sources
                    .iter()
                    .zip(&weights)
                    .map(|(&s, w)| w * standardized[s][t])
                    .sum::<f64>()
                    / mix_sd;
                level + scale * (c * mix + (1.0 - c) * noise[t])
            })
            .collect();
        strategy = strategy.add_parameter(
            ParameterMeta::new(
                format!("s{:03}", m + 1),
                format!("strategy process {}", m + 1),
                ParameterSpace::Control,
                "currency",
            ),
            values,
        );
    }
    Ok((base, strategy))
}

/// Indicator series of a base system and of the same system under a strategy.
#[derive(Debug, Clone, PartialEq)]
pub struct Comparison {
    pub k: usize,
    pub config: IndicatorConfig,
    pub base: IndicatorSeries,
    pub strategy: IndicatorSeries,
    pub result: ComparisonResult,
}

pub fn run_comparison(
    base: &Dataset,
    strategy: &Strategy,
    spec: WindowSpec,
    config: &IndicatorConfig,
) -> Result<Comparison> {
    let transformed = apply_strategy(base, strategy)?;
    compare_datasets(base, &transformed, spec, config)
}

/// Same as [`run_comparison`] for an alternative dataset supplied directly.
pub fn compare_datasets(
    base: &Dataset,
    alternative: &Dataset,
    spec: WindowSpec,
    config: &IndicatorConfig,
) -> Result<Comparison> {
    if base.t_max() != alternative.t_max() {
        return Err(Error::ConfigMismatch(format!(
            "t_max differs: {} vs {}",
            base.t_max(),
            alternative.t_max()
        )));
    }
    let base_series = indicator_series(base, spec, config)?;
    let strategy_series = indicator_series(alternative, spec, config)?;
    let result = compare_strategies(&base_series, &strategy_series)?;
    Ok(Comparison {
        k: spec.k(),
        config: *config,
        base: base_series,
        strategy: strategy_series,
        result,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_base() -> Dataset {
        let rows: Vec<Vec<f64>> = (0..12)
            .map(|t| vec![((t * 5) % 7) as f64, ((t * 3) % 11) as f64 * 0.5, (t % 4) as f64])
            .collect();
        Dataset::unlabeled(&rows).unwrap()
    }

    #[test]
    fn empty_strategy_is_identity() {
        let base = small_base();
        assert_eq!(apply_strategy(&base, &Strategy::new("none")).unwrap(), base);
    }

    #[test]
    fn scale_then_override_then_append() {
        let base = small_base();
        let s = Strategy::new("s")
            .scale("x1", 2.0)
            .override_value("x1", 3, -1.0)
            .add_parameter(
                ParameterMeta::new("fs", "fire safety", ParameterSpace::Control, ""),
                vec![1.0; 12],
            );
        let out = apply_strategy(&base, &s).unwrap();
        assert_eq!(out.n(), 4);
        assert_eq!(out.t_max(), 12);
        assert_eq!(out.value(2, 0), 2.0 * base.value(2, 0));
        assert_eq!(out.value(3, 0), -1.0);
        assert_eq!(out.column(3), &[1.0; 12]);
        assert_eq!(out.column(1), base.column(1));
        assert_eq!(out.meta()[3].space, ParameterSpace::Control);
    }

    #[test]
    fn bad_targets_are_rejected() {
        let base = small_base();
        let unknown = Strategy::new("s").override_value("nope", 1, 0.0);
        assert!(matches!(apply_strategy(&base, &unknown), Err(Error::UnknownParameter(id)) if id == "nope"));
        let unknown_scale = Strategy::new("s").scale("nope", 2.0);
        assert!(matches!(
            apply_strategy(&base, &unknown_scale),
            Err(Error::UnknownParameter(_))
        ));
        let short =
            Strategy::new("s").add_parameter(ParameterMeta::new("a", "a", ParameterSpace::Control, ""), vec![0.0; 5]);
        assert!(matches!(
            apply_strategy(&base, &short),
            Err(Error::LengthMismatch { .. })
        ));
        let late = Strategy::new("s").override_value("x1", 13, 0.0);
        assert!(matches!(apply_strategy(&base, &late), Err(Error::OutOfRange { .. })));
        let negative = Strategy::new("s").scale("x2", -1.0);
        assert!(apply_strategy(&base, &negative).is_err());
        let clash = Strategy::new("s").add_parameter(
            ParameterMeta::new("x1", "a", ParameterSpace::Control, ""),
            vec![0.0; 12],
        );
        assert!(matches!(
            apply_strategy(&base, &clash),
            Err(Error::DuplicateParameter(_))
        ));
    }

    #[test]
    fn synthetic_is_seed_deterministic() {
        let spec = SyntheticSpec {
            n_base: 12,
            t_max: 30,
            seed: 42,
            ..Default::default()
        };
        let (a, sa) = generate_synthetic(&spec).unwrap();
        let (b, sb) = generate_synthetic(&spec).unwrap();
        assert_eq!(a, b);
        assert_eq!(sa, sb);
        let (c, _) = generate_synthetic(&SyntheticSpec { seed: 43, ..spec }).unwrap();
        assert_ne!(a, c);
        assert_eq!(sa.added_parameters.len(), 5);
        assert!(sa.added_parameters.iter().all(|p| p.values.len() == 30));
    }

    #[test]
    fn synthetic_spec_ranges() {
        let ok = SyntheticSpec::default();
        assert!(ok.validate().is_ok());
        for bad in [
            SyntheticSpec {
                coupling: 2.0,
                ..ok.clone()
            },
            SyntheticSpec {
                coupling: -0.1,
                ..ok.clone()
            },
            SyntheticSpec {
                base_correlation: 1.0,
                ..ok.clone()
            },
            SyntheticSpec {
                n_base: 0,
                ..ok.clone()
            },
            SyntheticSpec { t_max: 1, ..ok.clone() },
            SyntheticSpec {
                sources_per_added: 0,
                ..ok.clone()
            },
        ] {
            assert!(matches!(generate_synthetic(&bad), Err(Error::InvalidSpec(_))));
        }
    }

    #[test]
    fn empty_strategy_comparison_is_zero() {
        let base = small_base();
        let cmp = run_comparison(
            &base,
            &Strategy::new("none"),
            WindowSpec::new(3).unwrap(),
            &IndicatorConfig::default(),
        )
        .unwrap();
        assert_eq!(cmp.result.delta_total, 0.0);
        assert!(cmp.result.delta_step.iter().all(|&d| d == 0.0));
    }

    #[test]
    fn mismatched_lengths_are_a_config_error() {
        let base = small_base();
        let shorter = Dataset::unlabeled(&(0..10).map(|t| vec![t as f64]).collect::<Vec<_>>()).unwrap();
        assert!(matches!(
            compare_datasets(
                &base,
                &shorter,
                WindowSpec::new(3).unwrap(),
                &IndicatorConfig::default()
            ),
            Err(Error::ConfigMismatch(_))
        ));
    }
}
