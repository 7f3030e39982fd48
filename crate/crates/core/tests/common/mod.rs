//! Independent reference implementations shared by the integration tests.
#![allow(dead_code)]

pub mod invariants;

use integral_indicators::Dataset;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Textbook sample Pearson coefficient; `None` when either sample variance
/// is below `threshold` or zero.
pub fn textbook_pearson(x: &[f64], y: &[f64], threshold: f64) -> Option<f64> {
    let k = x.len() as f64;
    let mx = x.iter().sum::<f64>() / k;
    let my = y.iter().sum::<f64>() / k;
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let syy: f64 = y.iter().map(|b| (b - my).powi(2)).sum();
    if sxx / (k - 1.0) < threshold || syy / (k - 1.0) < threshold || sxx == 0.0 || syy == 0.0 {
        return None;
    }
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    Some(sxy / (sxx * syy).sqrt())
}

/// `Σ x y / (k − 1)` by direct summation.
pub fn raw_moment(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum::<f64>() / (x.len() - 1) as f64
}

/// Column `i` of the window for time `t` (1-based), rows `x(t-1) … x(t-k)`.
pub fn window_column(ds: &Dataset, t: usize, k: usize, i: usize) -> Vec<f64> {
    (1..=k).map(|l| ds.value(t - l, i)).collect()
}

/// Textbook Pearson matrix, inactive rows and columns zero, active diagonal one.
pub fn naive_matrix(ds: &Dataset, t: usize, k: usize, threshold: f64) -> Vec<Vec<f64>> {
    let cols: Vec<Vec<f64>> = (0..ds.n()).map(|i| window_column(ds, t, k, i)).collect();
    let n = ds.n();
    let mut m = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..n {
            m[i][j] = match textbook_pearson(&cols[i], &cols[j], threshold) {
                Some(_) if i == j => 1.0,
                Some(r) => r,
                None => 0.0,
            };
        }
    }
    m
}

/// `G = Σ_t Σ_i Σ_j |r_ij(t)|` over `t = k+1 … t_max`.
pub fn naive_g_total(ds: &Dataset, k: usize, threshold: f64) -> f64 {
    (k + 1..=ds.t_max())
        .map(|t| {
            naive_matrix(ds, t, k, threshold)
                .iter()
                .flatten()
                .map(|r| r.abs())
                .sum::<f64>()
        })
        .sum()
}

/// Table whose columns have their own offset and scale, with an occasional
/// constant column.
pub fn mixed_dataset(rng: &mut ChaCha8Rng, t_max: usize, n: usize) -> Dataset {
    let columns: Vec<Vec<f64>> = (0..n)
        .map(|_| {
            if rng.random_bool(0.1) {
                return vec![rng.random_range(-5.0..5.0); t_max];
            }
            let offset = rng.random_range(-1e3..1e3);
            let scale = 10f64.powf(rng.random_range(-3.0..3.0));
            (0..t_max)
                .map(|_| offset + scale * rng.random_range(-1.0..1.0))
                .collect()
        })
        .collect();
    Dataset::unlabeled(&transpose(&columns)).unwrap()
}

pub fn seeded(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn transpose(columns: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let t_max = columns.first().map_or(0, Vec::len);
    (0..t_max).map(|t| columns.iter().map(|c| c[t]).collect()).collect()
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// `E|r|` for `k` independent normal pairs, by Simpson quadrature of the
/// null density `∝ (1 − r²)^((k−4)/2)` on `[0, 1]`.
pub fn null_mean_abs_r(k: usize) -> f64 {
    let p = (k as f64 - 4.0) / 2.0;
    let steps = 20_000;
    let h = 1.0 / steps as f64;
    let simpson = |f: &dyn Fn(f64) -> f64| {
        let mut s = f(0.0) + f(1.0);
        for m in 1..steps {
            s += f(m as f64 * h) * if m % 2 == 1 { 4.0 } else { 2.0 };
        }
        s * h / 3.0
    };
    let density = |r: f64| (1.0 - r * r).max(0.0).powf(p);
    simpson(&|r| r * density(r)) / simpson(&density)
}
