//! Sliding-window correlation analysis of multivariate dynamic systems.
//!
//! A system is a table of `n` parameters observed over `t_max` periods. At
//! every period the parameters' pairwise correlations over the preceding `k`
//! periods are summarized by the express integral indicator
//! `G_i(t) = Σ_j |r_ij(t)|`; summing over parameters and periods gives the
//! system state `G`, and two operating strategies are compared through the
//! difference of their states.

pub mod bench;
pub mod cli;
pub mod correlation;
pub mod error;
pub mod indicators;
pub mod io;
pub mod model;
pub mod scenario;

pub use correlation::{
    correlation_at, indicator_rows_blocked, CorrelationConfig, CorrelationMatrix, CorrelationMode, RollingMoments,
};
pub use error::{Error, Result};
pub use indicators::{
    compare_strategies, express_indicator, indicator_series, ComparisonResult, Evaluation, IndicatorConfig,
    IndicatorSeries,
};
pub use model::{analysis_range, window_slice, Dataset, ParameterMeta, ParameterSpace, Window, WindowSpec};
pub use scenario::{apply_strategy, generate_synthetic, run_comparison, Comparison, Strategy, SyntheticSpec};
