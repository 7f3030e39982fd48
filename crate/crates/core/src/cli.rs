//! Command-line pipeline: validate → compute → compare → report, plus
//! synthetic data generation and benchmarking.
//!
//! Exit codes: `0` success, `1` internal error, `2` user or data error.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::bench;
use crate::correlation::{CorrelationConfig, CorrelationMode, DEFAULT_REINIT_INTERVAL, DEFAULT_VARIANCE_THRESHOLD};
use crate::error::{Error, Result};
use crate::indicators::{indicator_series, Evaluation, IndicatorConfig, DEFAULT_BLOCK_SIZE};
use crate::io::{self, ComparisonReport, ConfigEcho};
use crate::model::{Dataset, WindowSpec};
use crate::scenario::{self, SyntheticSpec, RNG_DESCRIPTION};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INTERNAL: i32 = 1;
pub const EXIT_USER: i32 = 2;

/// Fully resolved run settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub k: usize,
    pub mode: CorrelationMode,
    pub variance_threshold: f64,
    pub block_size: usize,
    pub reinit_interval: usize,
    pub threads: Option<usize>,
    pub seed: Option<u64>,
    pub fill_zero: bool,
    pub no_rolling: bool,
    pub out_dir: PathBuf,
    pub method_label: Option<String>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            k: WindowSpec::DEFAULT_K,
            mode: CorrelationMode::Pearson,
            variance_threshold: DEFAULT_VARIANCE_THRESHOLD,
            block_size: DEFAULT_BLOCK_SIZE,
            reinit_interval: DEFAULT_REINIT_INTERVAL,
            threads: None,
            seed: None,
            fill_zero: false,
            no_rolling: false,
            out_dir: PathBuf::from("."),
            method_label: None,
        }
    }
}

impl RunConfig {
    pub fn window(&self) -> Result<WindowSpec> {
        WindowSpec::new(self.k)
    }

    pub fn indicator_config(&self) -> IndicatorConfig {
        IndicatorConfig {
            correlation: CorrelationConfig {
                mode: self.mode,
                variance_threshold: self.variance_threshold,
            },
            evaluation: if self.no_rolling {
                Evaluation::Recompute
            } else {
                Evaluation::Rolling
            },
            block_size: self.block_size,
            reinit_interval: self.reinit_interval,
        }
    }

    pub fn echo(&self) -> ConfigEcho {
        let mut echo = ConfigEcho::new(self.k, &self.indicator_config());
        echo.threads = self.threads;
        echo.seeds = self.seed.into_iter().collect();
        echo.method_label = self.method_label.clone();
        echo
    }

    fn check(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Schema(format!("invalid configuration: {m}")));
        if self.k < 2 {
            return bad("k must be at least 2");
        }
        if !(self.variance_threshold.is_finite() && self.variance_threshold > 0.0) {
            return bad("variance_threshold must be positive");
        }
        if self.block_size == 0 {
            return bad("block_size must be positive");
        }
        if self.reinit_interval == 0 {
            return bad("reinit_interval must be positive");
        }
        if self.threads == Some(0) {
            return bad("threads must be positive");
        }
        Ok(())
    }
}

/// Settings shared by every subcommand; each may also come from `--config`.
#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigArgs {
    /// JSON file with any of these settings; flags take precedence
    #[arg(long, value_name = "PATH")]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    /// Window length in time steps
    #[arg(long)]
    pub k: Option<usize>,
    /// Correlation estimator: pearson or raw-moment
    #[arg(long)]
    pub mode: Option<CorrelationMode>,
    /// Window variance below which a column is inactive
    #[arg(long)]
    pub variance_threshold: Option<f64>,
    /// Tile size for recomputation without the rolling route
    #[arg(long)]
    pub block_size: Option<usize>,
    /// Steps between full rebuilds of the rolling sums
    #[arg(long)]
    pub reinit_interval: Option<usize>,
    /// Worker threads (default: all cores)
    #[arg(long)]
    pub threads: Option<usize>,
    /// RNG seed (generate) or seed recorded in reports
    #[arg(long)]
    pub seed: Option<u64>,
    /// Read blank CSV cells as 0
    #[arg(long)]
    #[serde(default)]
    pub fill_zero: bool,
    /// Recompute every window instead of sliding the rolling sums
    #[arg(long)]
    #[serde(default)]
    pub no_rolling: bool,
    /// Directory for output artifacts
    #[arg(long, value_name = "DIR")]
    pub out_dir: Option<PathBuf>,
    /// Free-text label of the control method, recorded in reports
    #[arg(long)]
    pub method_label: Option<String>,
}

impl ConfigArgs {
    /// Defaults, overlaid by the `--config` file, overlaid by flags.
    pub fn resolve(&self) -> Result<RunConfig> {
        let mut cfg = RunConfig::default();
        if let Some(path) = &self.config {
            let file: ConfigArgs = io::read_json(path)?;
            file.apply(&mut cfg);
        }
        self.apply(&mut cfg);
        cfg.check()?;
        Ok(cfg)
    }

    fn apply(&self, cfg: &mut RunConfig) {
        if let Some(k) = self.k {
            cfg.k = k;
        }
        if let Some(m) = self.mode {
            cfg.mode = m;
        }
        if let Some(v) = self.variance_threshold {
            cfg.variance_threshold = v;
        }
        if let Some(b) = self.block_size {
            cfg.block_size = b;
        }
        if let Some(r) = self.reinit_interval {
            cfg.reinit_interval = r;
        }
        if self.threads.is_some() {
            cfg.threads = self.threads;
        }
        if self.seed.is_some() {
            cfg.seed = self.seed;
        }
        cfg.fill_zero |= self.fill_zero;
        cfg.no_rolling |= self.no_rolling;
        if let Some(d) = &self.out_dir {
            cfg.out_dir = d.clone();
        }
        if self.method_label.is_some() {
            cfg.method_label = self.method_label.clone();
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "integral",
    version,
    about = "Integral indicators of multivariate dynamic systems"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check that a dataset can be analysed; exit 2 with findings if not
    Validate {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        config: ConfigArgs,
    },
    /// Compute G_i(t), G(t) and G for one dataset
    Compute {
        #[command(flatten)]
        data: DataArgs,
        /// Label for the series column and report entry
        #[arg(long, default_value = "base")]
        label: String,
        #[command(flatten)]
        config: ConfigArgs,
    },
    /// Compare a base dataset with a strategy: ΔG = G_base − G_strategy
    Compare {
        /// Base dataset CSV
        #[arg(long, value_name = "CSV")]
        base: PathBuf,
        /// Base metadata sidecar (default: <base>.meta.json)
        #[arg(long, value_name = "JSON")]
        base_meta: Option<PathBuf>,
        /// Strategy dataset CSV
        #[arg(
            long,
            value_name = "CSV",
            conflicts_with = "strategy",
            required_unless_present = "strategy"
        )]
        strategy_data: Option<PathBuf>,
        /// Strategy dataset sidecar (default: <strategy-data>.meta.json)
        #[arg(long, value_name = "JSON")]
        strategy_meta: Option<PathBuf>,
        /// Strategy definition applied to the base dataset
        #[arg(long, value_name = "JSON")]
        strategy: Option<PathBuf>,
        #[arg(long, default_value = "base")]
        base_label: String,
        #[arg(long, default_value = "strategy")]
        strategy_label: String,
        #[command(flatten)]
        config: ConfigArgs,
    },
    /// Generate a synthetic base dataset and coupled strategy
    Generate {
        /// Synthetic spec JSON (default: built-in desk-scale spec)
        #[arg(long, value_name = "JSON")]
        spec: Option<PathBuf>,
        #[command(flatten)]
        config: ConfigArgs,
    },
    /// Time the rolling route against naive recomputation
    Bench {
        /// Parameter counts to sweep
        #[arg(long, value_delimiter = ',', default_value = "100,1000")]
        sizes: Vec<usize>,
        #[arg(long, default_value_t = 60)]
        t_max: usize,
        /// Best-of repetitions per size
        #[arg(long, default_value_t = 3)]
        repeats: usize,
        #[command(flatten)]
        config: ConfigArgs,
    },
}

#[derive(Debug, Clone, Args)]
pub struct DataArgs {
    /// Dataset CSV
    #[arg(long, value_name = "CSV")]
    pub data: PathBuf,
    /// Metadata sidecar (default: <data>.meta.json)
    #[arg(long, value_name = "JSON")]
    pub meta: Option<PathBuf>,
}

impl DataArgs {
    fn load(&self, cfg: &RunConfig) -> Result<Dataset> {
        load(&self.data, self.meta.as_deref(), cfg)
    }
}

fn load(data: &Path, meta: Option<&Path>, cfg: &RunConfig) -> Result<Dataset> {
    let meta = meta.map_or_else(|| io::sidecar_path(data), Path::to_path_buf);
    io::load_csv_with(
        data,
        meta,
        io::LoadOptions {
            fill_zero: cfg.fill_zero,
        },
    )
}

fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Io { source, .. } if source.kind() != std::io::ErrorKind::NotFound => EXIT_INTERNAL,
        _ => EXIT_USER,
    }
}

fn prepare_out_dir(cfg: &RunConfig) -> Result<()> {
    fs::create_dir_all(&cfg.out_dir).map_err(|e| Error::Io {
        path: cfg.out_dir.clone(),
        source: e,
    })
}

fn with_threads<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> T {
    match threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .expect("thread pool")
            .install(f),
        None => f(),
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            return if e.use_stderr() {
                let _ = write!(err, "{e}");
                EXIT_USER
            } else {
                let _ = write!(out, "{e}");
                EXIT_OK
            };
        }
    };
    match execute(cli.command, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

fn execute(command: Command, out: &mut dyn Write) -> Result<i32> {
    match command {
        Command::Validate { data, config } => cmd_validate(&data, &config.resolve()?, out),
        Command::Compute { data, label, config } => {
            let cfg = config.resolve()?;
            with_threads(cfg.threads, || cmd_compute(&data, &label, &cfg)).map(|g| {
                let _ = writeln!(out, "G = {}", io::format_number(g.0));
                let _ = writeln!(out, "steps = {}", g.1);
                EXIT_OK
            })
        }
        Command::Compare {
            base,
            base_meta,
            strategy_data,
            strategy_meta,
            strategy,
            base_label,
            strategy_label,
            config,
        } => {
            let cfg = config.resolve()?;
            let base_ds = load(&base, base_meta.as_deref(), &cfg)?;
            let alternative = match (&strategy_data, &strategy) {
                (Some(path), _) => load(path, strategy_meta.as_deref(), &cfg)?,
                (None, Some(def)) => scenario::apply_strategy(&base_ds, &io::read_strategy(def)?)?,
                (None, None) => unreachable!("clap requires one strategy source"),
            };
            let report = with_threads(cfg.threads, || {
                cmd_compare(&base_ds, &alternative, &base_label, &strategy_label, &cfg)
            })?;
            let _ = writeln!(
                out,
                "G_{} = {}",
                base_label,
                io::format_number(report.strategies[0].g_total)
            );
            let _ = writeln!(
                out,
                "G_{} = {}",
                strategy_label,
                io::format_number(report.strategies[1].g_total)
            );
            let _ = writeln!(
                out,
                "delta_total = {}",
                io::format_number(report.delta_total.unwrap_or_default())
            );
            Ok(EXIT_OK)
        }
        Command::Generate { spec, config } => {
            let cfg = config.resolve()?;
            let spec = cmd_generate(spec.as_deref(), &cfg)?;
            let _ = writeln!(
                out,
                "generated n_base = {}, t_max = {}, coupled_count = {}, seed = {} into {}",
                spec.n_base,
                spec.t_max,
                spec.coupled_count,
                spec.seed,
                cfg.out_dir.display()
            );
            Ok(EXIT_OK)
        }
        Command::Bench {
            sizes,
            t_max,
            repeats,
            config,
        } => {
            let cfg = config.resolve()?;
            let rows = bench::run_bench(&sizes, t_max, cfg.k, cfg.seed.unwrap_or(0), repeats)?;
            prepare_out_dir(&cfg)?;
            bench::write_bench_csv(&rows, cfg.out_dir.join("bench.csv"))?;
            let _ = write!(out, "{}", bench::format_table(&rows));
            let _ = writeln!(out, "({})", bench::HARDWARE_NOTE);
            let failing: Vec<usize> = rows.iter().filter(|r| !r.passes()).map(|r| r.n).collect();
            if failing.is_empty() {
                Ok(EXIT_OK)
            } else {
                let _ = writeln!(out, "rolling slower than recomputation at n = {failing:?}");
                Ok(EXIT_INTERNAL)
            }
        }
    }
}

/// Prints the validation summary; exit 0 when analysable, 2 otherwise.
pub fn cmd_validate(data: &DataArgs, cfg: &RunConfig, out: &mut dyn Write) -> Result<i32> {
    let ds = data.load(cfg)?;
    let summary = io::validate(&ds, cfg.window()?, cfg.variance_threshold);
    let _ = write!(out, "{summary}");
    Ok(if summary.is_analyzable() { EXIT_OK } else { EXIT_USER })
}

/// Writes `report.json` and `series.csv`; returns `(G, number of steps)`.
pub fn cmd_compute(data: &DataArgs, label: &str, cfg: &RunConfig) -> Result<(f64, usize)> {
    let ds = data.load(cfg)?;
    let series = indicator_series(&ds, cfg.window()?, &cfg.indicator_config())?;
    prepare_out_dir(cfg)?;
    io::write_report(
        &ComparisonReport::single(label, &series, cfg.echo()),
        cfg.out_dir.join("report.json"),
    )?;
    io::write_series_csv(&[(label, &series)], cfg.out_dir.join("series.csv"))?;
    Ok((series.g_total(), series.len()))
}

/// Writes `report.json` and the two-series `series.csv`.
pub fn cmd_compare(
    base: &Dataset,
    alternative: &Dataset,
    base_label: &str,
    strategy_label: &str,
    cfg: &RunConfig,
) -> Result<ComparisonReport> {
    let cmp = scenario::compare_datasets(base, alternative, cfg.window()?, &cfg.indicator_config())?;
    let report = ComparisonReport::from_comparison(base_label, strategy_label, &cmp, cfg.echo());
    prepare_out_dir(cfg)?;
    io::write_report(&report, cfg.out_dir.join("report.json"))?;
    io::write_series_csv(
        &[(base_label, &cmp.base), (strategy_label, &cmp.strategy)],
        cfg.out_dir.join("series.csv"),
    )?;
    Ok(report)
}

/// Writes `base.csv`, `base.meta.json`, `strategy.json` and the effective `synthetic.json`.
pub fn cmd_generate(spec_path: Option<&Path>, cfg: &RunConfig) -> Result<SyntheticSpec> {
    let mut spec = match spec_path {
        Some(p) => io::read_synthetic_spec(p)?,
        None => SyntheticSpec::default(),
    };
    if let Some(seed) = cfg.seed {
        spec.seed = seed;
    }
    let (base, strategy) = scenario::generate_synthetic(&spec)?;
    prepare_out_dir(cfg)?;
    let dir = &cfg.out_dir;
    io::write_dataset(&base, dir.join("base.csv"), dir.join("base.meta.json"))?;
    io::write_strategy(&strategy, dir.join("strategy.json"))?;
    io::write_json(
        &serde_json::json!({
            "format_version": io::FORMAT_VERSION,
            "spec": &spec,
            "rng": RNG_DESCRIPTION,
            "config": cfg.echo(),
        }),
        dir.join("synthetic.json"),
    )?;
    Ok(spec)
}
