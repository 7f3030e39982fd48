use crate::error::{Error, Result};
use crate::model::{Dataset, WindowSpec};

use super::{column_stats, CorrelationConfig, CorrelationMatrix, CorrelationMode};

pub const DEFAULT_REINIT_INTERVAL: usize = 256;

// A column is re-centred once the largest shifted sum of squares it has held
// since its last reset exceeds its centred sum of squares by this factor: the
// shift has drifted ~100 standard deviations away, or the column's scale has
// collapsed and its sums carry cancellation error from larger past terms.
const RECENTER_RATIO: f64 = 1e4;

fn shifted_mean(values: &[f64], shift: f64) -> f64 {
    values.iter().map(|x| x - shift).sum::<f64>() / values.len() as f64
}

#[inline]
fn kahan_add(sum: &mut f64, comp: &mut f64, x: f64) {
    let y = x - *comp;
    let t = *sum + y;
    *comp = (t - *sum) - y;
    *sum = t;
}

/// Running window sums for incremental evaluation of `R_k(t)`.
///
/// Sums are kept over shifted values `x^i - c_i`, where the shift `c_i` is the
/// window mean at the last (re-)initialisation of column `i`, and each sum
/// carries a Kahan compensation term. Column means and variances are
/// recomputed exactly from the stored window rows on every step (`O(k·n)`),
/// which also detects columns whose shift has drifted far from the data or
/// whose scale has collapsed below that of earlier terms in their sums; those
/// columns are re-centred from the window in `O(k·n)`. All sums are rebuilt
/// from the window every `reinit_interval` steps.
///
/// Stepping costs `O(n²)` for the pair sums.
#[derive(Debug, Clone)]
pub struct RollingMoments {
    k: usize,
    n: usize,
    /// the window currently describes time step `t`: rows x(t-1) … x(t-k)
    t: usize,
    shift: Vec<f64>,
    sum: Vec<f64>,
    sum_comp: Vec<f64>,
    // packed upper triangle, diagonal included
    pair: Vec<f64>,
    pair_comp: Vec<f64>,
    // column-major k x n ring of window rows
    ring: Vec<f64>,
    newest: usize,
    mean: Vec<f64>,
    var: Vec<f64>,
    // window mean of `x^i - c_i`, summed from the exact shifted values
    shifted_mean: Vec<f64>,
    // largest shifted sum of squares since the column's last reset
    peak: Vec<f64>,
    reinit_interval: usize,
    since_reinit: usize,
    recenters: usize,
}

impl RollingMoments {
    /// Moments of rows `1 … k`, the window for `t = k + 1`.
    pub fn init(dataset: &Dataset, spec: WindowSpec, reinit_interval: usize) -> Result<Self> {
        let k = spec.k();
        spec.range_for(dataset.t_max())?;
        let n = dataset.n();
        let mut ring = vec![0.0; k * n];
        for i in 0..n {
            ring[i * k..(i + 1) * k].copy_from_slice(&dataset.column(i)[..k]);
        }
        let mut m = RollingMoments {
            k,
            n,
            t: k + 1,
            shift: vec![0.0; n],
            sum: vec![0.0; n],
            sum_comp: vec![0.0; n],
            pair: vec![0.0; n * (n + 1) / 2],
            pair_comp: vec![0.0; n * (n + 1) / 2],
            ring,
            newest: k - 1,
            mean: vec![0.0; n],
            var: vec![0.0; n],
            shifted_mean: vec![0.0; n],
            peak: vec![0.0; n],
            reinit_interval,
            since_reinit: 0,
            recenters: 0,
        };
        m.rebuild();
        Ok(m)
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Time step whose window the moments currently describe.
    pub fn t(&self) -> usize {
        self.t
    }

    /// Number of single-column re-centrings performed so far.
    pub fn recenter_count(&self) -> usize {
        self.recenters
    }

    #[inline]
    fn idx(&self, i: usize, j: usize) -> usize {
        let (i, j) = if i <= j { (i, j) } else { (j, i) };
        i * (2 * self.n - i + 1) / 2 + (j - i)
    }

    fn slot(&self, l: usize) -> usize {
        // l = 0 is the newest row x(t-1)
        (self.newest + self.k - l) % self.k
    }

    fn window_column(&self, i: usize, buf: &mut Vec<f64>) {
        buf.clear();
        let col = &self.ring[i * self.k..(i + 1) * self.k];
        buf.extend((0..self.k).map(|l| col[self.slot(l)]));
    }

    /// Window rows, newest first.
    pub fn window_rows(&self) -> Vec<Vec<f64>> {
        (0..self.k)
            .map(|l| {
                let s = self.slot(l);
                (0..self.n).map(|i| self.ring[i * self.k + s]).collect()
            })
            .collect()
    }

    fn refresh_stats(&mut self) {
        let mut buf = Vec::with_capacity(self.k);
        for i in 0..self.n {
            self.window_column(i, &mut buf);
            let (mean, var) = column_stats(&buf);
            self.mean[i] = mean;
            self.var[i] = var;
            self.shifted_mean[i] = shifted_mean(&buf, self.shift[i]);
        }
    }

    fn rebuild(&mut self) {
        self.refresh_stats();
        let (k, n) = (self.k, self.n);
        self.shift.copy_from_slice(&self.mean);
        let mut buf = Vec::with_capacity(k);
        for i in 0..n {
            self.window_column(i, &mut buf);
            self.shifted_mean[i] = shifted_mean(&buf, self.shift[i]);
        }
        let mut dev = vec![0.0; k * n];
        for i in 0..n {
            let c = self.shift[i];
            for (d, x) in dev[i * k..(i + 1) * k].iter_mut().zip(&self.ring[i * k..(i + 1) * k]) {
                *d = x - c;
            }
            self.sum[i] = dev[i * k..(i + 1) * k].iter().sum();
        }
        for i in 0..n {
            let di = &dev[i * k..(i + 1) * k];
            let base = self.idx(i, i);
            for j in i..n {
                let dj = &dev[j * k..(j + 1) * k];
                self.pair[base + j - i] = di.iter().zip(dj).map(|(a, b)| a * b).sum();
            }
        }
        for i in 0..n {
            self.peak[i] = self.pair[self.idx(i, i)];
        }
        self.sum_comp.fill(0.0);
        self.pair_comp.fill(0.0);
        self.since_reinit = 0;
    }

    fn recenter(&mut self, i: usize) {
        let k = self.k;
        self.shift[i] = self.mean[i];
        let di: Vec<f64> = self.ring[i * k..(i + 1) * k]
            .iter()
            .map(|x| x - self.shift[i])
            .collect();
        self.sum[i] = di.iter().sum();
        self.sum_comp[i] = 0.0;
        self.shifted_mean[i] = self.sum[i] / k as f64;
        for j in 0..self.n {
            let cj = self.shift[j];
            let dj = &self.ring[j * k..(j + 1) * k];
            let p: f64 = di.iter().zip(dj).map(|(a, b)| a * (b - cj)).sum();
            let idx = self.idx(i, j);
            self.pair[idx] = p;
            self.pair_comp[idx] = 0.0;
        }
        self.peak[i] = self.pair[self.idx(i, i)];
        self.recenters += 1;
    }

    /// Slides the window from `t` to `t + 1`; `incoming` is the row `x(t)`.
    pub fn step(&mut self, incoming: &[f64]) {
        assert_eq!(incoming.len(), self.n, "incoming row has wrong width");
        let (k, n) = (self.k, self.n);
        let oldest = (self.newest + 1) % k;
        let d_old: Vec<f64> = (0..n).map(|i| self.ring[i * k + oldest] - self.shift[i]).collect();
        let d_new: Vec<f64> = (0..n).map(|i| incoming[i] - self.shift[i]).collect();

        for i in 0..n {
            kahan_add(&mut self.sum[i], &mut self.sum_comp[i], d_new[i] - d_old[i]);
        }
        for i in 0..n {
            let base = self.idx(i, i);
            let len = n - i;
            let (a_new, a_old) = (d_new[i], d_old[i]);
            let sums = &mut self.pair[base..base + len];
            let comps = &mut self.pair_comp[base..base + len];
            for (((s, c), &bn), &bo) in sums.iter_mut().zip(comps.iter_mut()).zip(&d_new[i..]).zip(&d_old[i..]) {
                kahan_add(s, c, a_new * bn - a_old * bo);
            }
        }

        for (i, &x) in incoming.iter().enumerate() {
            self.ring[i * k + oldest] = x;
        }
        self.newest = oldest;
        self.t += 1;
        self.since_reinit += 1;

        if self.reinit_interval > 0 && self.since_reinit >= self.reinit_interval {
            self.rebuild();
            return;
        }
        self.refresh_stats();
        for i in 0..n {
            let centred = (k - 1) as f64 * self.var[i];
            let shifted = self.pair[self.idx(i, i)];
            self.peak[i] = self.peak[i].max(shifted);
            // a variance at the rounding level of the data is left alone
            let resolution = 16.0 * f64::EPSILON * self.mean[i].abs();
            if self.peak[i] > RECENTER_RATIO * centred && centred > (k - 1) as f64 * resolution * resolution {
                self.recenter(i);
            }
        }
    }

    /// Reads `x(t)` from `dataset` and advances to `t + 1`, which must not pass `t_max`.
    pub fn advance(&mut self, dataset: &Dataset) -> Result<()> {
        if self.t >= dataset.t_max() {
            return Err(Error::OutOfRange {
                t: self.t + 1,
                first: self.k + 1,
                last: dataset.t_max(),
            });
        }
        let mut row = vec![0.0; self.n];
        dataset.row_into(self.t, &mut row);
        self.step(&row);
        Ok(())
    }

    fn shifted_sum(&self, i: usize) -> f64 {
        self.sum[i] - self.sum_comp[i]
    }

    fn shifted_pair(&self, i: usize, j: usize) -> f64 {
        let idx = self.idx(i, j);
        self.pair[idx] - self.pair_comp[idx]
    }

    /// `Σ_l x^i(t-l)` over the current window.
    pub fn sum(&self, i: usize) -> f64 {
        self.shifted_sum(i) + self.k as f64 * self.shift[i]
    }

    /// `Σ_l x^i(t-l)²` over the current window.
    pub fn sum_sq(&self, i: usize) -> f64 {
        self.sum_product(i, i)
    }

    /// `Σ_l x^i(t-l) x^j(t-l)` over the current window.
    pub fn sum_product(&self, i: usize, j: usize) -> f64 {
        let (ci, cj) = (self.shift[i], self.shift[j]);
        self.shifted_pair(i, j) + cj * self.shifted_sum(i) + ci * self.shifted_sum(j) + self.k as f64 * ci * cj
    }

    fn pearson_weights(&self, threshold: f64) -> (Vec<f64>, Vec<f64>) {
        let scale = ((self.k - 1) as f64).sqrt();
        let weight = self
            .var
            .iter()
            .map(|&v| {
                if v >= threshold && v > 0.0 {
                    1.0 / (v.sqrt() * scale)
                } else {
                    0.0
                }
            })
            .collect();
        (weight, self.shifted_mean.clone())
    }

    /// Number of columns below the variance threshold in the current window.
    pub fn inactive_count(&self, threshold: f64) -> usize {
        self.var.iter().filter(|&&v| !(v >= threshold && v > 0.0)).count()
    }

    /// Materializes the correlation matrix of the current window.
    pub fn correlation(&self, config: &CorrelationConfig) -> CorrelationMatrix {
        let active: Vec<bool> = self
            .var
            .iter()
            .map(|&v| v >= config.variance_threshold && v > 0.0)
            .collect();
        match config.mode {
            CorrelationMode::Pearson => {
                let (w, dm) = self.pearson_weights(config.variance_threshold);
                let k = self.k as f64;
                CorrelationMatrix::from_upper(self.t, config.mode, active.clone(), |i, j| {
                    if !active[i] || !active[j] {
                        0.0
                    } else if i == j {
                        1.0
                    } else {
                        ((self.shifted_pair(i, j) - k * dm[i] * dm[j]) * w[i] * w[j]).clamp(-1.0, 1.0)
                    }
                })
            }
            CorrelationMode::RawMoment => {
                let denom = (self.k - 1) as f64;
                CorrelationMatrix::from_upper(self.t, config.mode, active, |i, j| self.sum_product(i, j) / denom)
            }
        }
    }

    /// Absolute row sums `Σ_j |r_ij|` of the current window's matrix, without
    /// materializing it.
    pub fn indicator_rows(&self, config: &CorrelationConfig) -> Vec<f64> {
        let n = self.n;
        let mut g = vec![0.0; n];
        match config.mode {
            CorrelationMode::Pearson => {
                let (w, dm) = self.pearson_weights(config.variance_threshold);
                let k = self.k as f64;
                for i in 0..n {
                    if w[i] == 0.0 {
                        continue;
                    }
                    let base = self.idx(i, i);
                    let (wi, kdi) = (w[i], k * dm[i]);
                    let mut acc = 1.0;
                    for j in i + 1..n {
                        let idx = base + j - i;
                        let p = self.pair[idx] - self.pair_comp[idx];
                        let r = ((p - kdi * dm[j]) * wi * w[j]).abs().min(1.0);
                        acc += r;
                        g[j] += r;
                    }
                    g[i] += acc;
                }
            }
            CorrelationMode::RawMoment => {
                let denom = (self.k - 1) as f64;
                for i in 0..n {
                    let mut acc = (self.sum_product(i, i) / denom).abs();
                    for (j, gj) in g.iter_mut().enumerate().skip(i + 1) {
                        let r = (self.sum_product(i, j) / denom).abs();
                        acc += r;
                        *gj += r;
                    }
                    g[i] += acc;
                }
            }
        }
        g
    }
}
