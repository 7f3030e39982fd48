//! Timing of the rolling route against naive per-step recomputation.

use std::fs::File;
use std::io::Write;
use std::path::Path;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::indicators::{indicator_series, Evaluation, IndicatorConfig};
use crate::model::{Dataset, WindowSpec};

pub const HARDWARE_NOTE: &str = "timings are hardware-dependent; single worker thread";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub n: usize,
    pub t_max: usize,
    pub k: usize,
    pub steps: usize,
    pub rolling_total_ms: f64,
    pub naive_total_ms: f64,
    pub rolling_ms_per_step: f64,
    pub naive_ms_per_step: f64,
    pub speedup: f64,
    /// `g_total` difference between the two routes.
    pub max_abs_diff: f64,
}

impl BenchRow {
    /// Rolling must not be slower than recomputation from `n = 100` up.
    pub fn passes(&self) -> bool {
        self.n < 100 || self.rolling_total_ms <= self.naive_total_ms
    }
}

/// Uniform `[0, 1)` table drawn from `ChaCha8Rng::seed_from_u64(seed)`, row by row.
pub fn random_dataset(t_max: usize, n: usize, seed: u64) -> Dataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rows: Vec<Vec<f64>> = (0..t_max)
        .map(|_| (0..n).map(|_| rng.random::<f64>()).collect())
        .collect();
    Dataset::unlabeled(&rows).expect("generated rows are rectangular and finite")
}

fn best_of(repeats: usize, mut f: impl FnMut() -> Result<f64>) -> Result<(Duration, f64)> {
    let mut best = Duration::MAX;
    let mut value = 0.0;
    for _ in 0..repeats.max(1) {
        let start = Instant::now();
        value = f()?;
        best = best.min(start.elapsed());
    }
    Ok((best, value))
}

/// Times full runs of both routes on one worker thread, best of `repeats`.
pub fn run_bench(sizes: &[usize], t_max: usize, k: usize, seed: u64, repeats: usize) -> Result<Vec<BenchRow>> {
    let spec = WindowSpec::new(k)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .expect("single-thread pool");
    sizes
        .iter()
        .map(|&n| {
            let ds = random_dataset(t_max, n, seed);
            let steps = t_max.saturating_sub(k);
            let rolling_cfg = IndicatorConfig::default().with_evaluation(Evaluation::Rolling);
            let naive_cfg = IndicatorConfig::default().with_evaluation(Evaluation::FullMatrix);
            let (rolling, g_roll) =
                pool.install(|| best_of(repeats, || Ok(indicator_series(&ds, spec, &rolling_cfg)?.g_total())))?;
            let (naive, g_naive) =
                pool.install(|| best_of(repeats, || Ok(indicator_series(&ds, spec, &naive_cfg)?.g_total())))?;
            let (r_ms, n_ms) = (rolling.as_secs_f64() * 1e3, naive.as_secs_f64() * 1e3);
            Ok(BenchRow {
                n,
                t_max,
                k,
                steps,
                rolling_total_ms: r_ms,
                naive_total_ms: n_ms,
                rolling_ms_per_step: r_ms / steps as f64,
                naive_ms_per_step: n_ms / steps as f64,
                speedup: n_ms / r_ms,
                max_abs_diff: (g_roll - g_naive).abs(),
            })
        })
        .collect()
}

pub fn write_bench_csv(rows: &[BenchRow], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut file = File::create(path).map_err(|e| Error::io(path, e))?;
    writeln!(file, "# {HARDWARE_NOTE}").map_err(|e| Error::io(path, e))?;
    let mut w = csv::Writer::from_writer(file);
    for row in rows {
        w.serialize(row)
            .map_err(|e| Error::Schema(format!("{}: {e}", path.display())))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn read_bench_csv(path: impl AsRef<Path>) -> Result<Vec<BenchRow>> {
    let path = path.as_ref();
    let mut r = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_path(path)
        .map_err(|e| Error::Schema(format!("{}: {e}", path.display())))?;
    r.deserialize()
        .map(|row| row.map_err(|e| Error::Schema(format!("{}: {e}", path.display()))))
        .collect()
}

pub fn format_table(rows: &[BenchRow]) -> String {
    let mut out = format!(
        "{:>7} {:>6} {:>3} {:>14} {:>14} {:>8}\n",
        "n", "t_max", "k", "rolling ms/st", "naive ms/st", "speedup"
    );
    for r in rows {
        out.push_str(&format!(
            "{:>7} {:>6} {:>3} {:>14.4} {:>14.4} {:>7.2}x\n",
            r.n, r.t_max, r.k, r.rolling_ms_per_step, r.naive_ms_per_step, r.speedup
        ));
    }
    out
}
