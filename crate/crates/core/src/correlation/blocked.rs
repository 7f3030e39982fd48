use rayon::prelude::*;

use crate::error::Result;
use crate::model::{window_slice, Dataset, WindowSpec};

use super::{CorrelationConfig, PreparedWindow};

/// Absolute row sums `Σ_j |r_ij|` at time `t`, computed tile by tile.
///
/// Row blocks are processed in parallel; each worker owns the rows of its
/// block and walks the column blocks in order, so the result does not depend
/// on scheduling. Peak extra memory is one `block_size²` tile per worker plus
/// the prepared `k × n` window.
pub fn indicator_rows_blocked(
    dataset: &Dataset,
    t: usize,
    spec: WindowSpec,
    config: &CorrelationConfig,
    block_size: usize,
) -> Result<Vec<f64>> {
    assert!(block_size >= 1, "block_size must be positive");
    let window = window_slice(dataset, t, spec)?;
    Ok(blocked_rows(&PreparedWindow::new(&window, config), block_size))
}

pub(crate) fn blocked_rows(prepared: &PreparedWindow, block_size: usize) -> Vec<f64> {
    let n = prepared.n;

    let row_blocks: Vec<Vec<f64>> = (0..n)
        .step_by(block_size)
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|i0| {
            let i1 = (i0 + block_size).min(n);
            let mut sums = vec![0.0; i1 - i0];
            let mut tile = vec![0.0; block_size * block_size];
            for j0 in (0..n).step_by(block_size) {
                let j1 = (j0 + block_size).min(n);
                let width = j1 - j0;
                for i in i0..i1 {
                    for j in j0..j1 {
                        tile[(i - i0) * width + (j - j0)] = prepared.entry(i, j).abs();
                    }
                }
                for (bi, s) in sums.iter_mut().enumerate() {
                    *s += tile[bi * width..(bi + 1) * width].iter().sum::<f64>();
                }
            }
            sums
        })
        .collect();

    row_blocks.concat()
}
