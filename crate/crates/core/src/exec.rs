//! Parallel execution helpers.
//!
//! Kernel application is embarrassingly parallel over output nodes: every
//! node reads shared immutable state and writes its own slot. With the
//! `parallel` feature the maps below fan out over rayon's global pool;
//! without it they run as plain loops. Outputs are bitwise identical either
//! way because no cross-node reduction is involved.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Map `f` over `0..n`, collecting results in index order.
pub(crate) fn map_nodes<F>(n: usize, f: F) -> Vec<f64>
where
    F: Fn(usize) -> f64 + Send + Sync,
{
    #[cfg(feature = "parallel")]
    {
        (0..n).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..n).map(f).collect()
    }
}

/// Sequential variant of [`map_nodes`], always single-threaded.
///
/// Kept available regardless of features so benchmarks can compare the
/// parallel and sequential drivers in one build.
pub(crate) fn map_nodes_serial<F>(n: usize, f: F) -> Vec<f64>
where
    F: Fn(usize) -> f64 + Send + Sync,
{
    (0..n).map(f).collect()
}

/// Fill a flat row-major matrix, one closure call per row, in parallel when
/// enabled.
pub(crate) fn map_rows_flat<F>(rows: usize, cols: usize, fill: F) -> Vec<f64>
where
    F: Fn(usize, &mut [f64]) + Send + Sync,
{
    let mut out = vec![0.0f64; rows * cols];
    #[cfg(feature = "parallel")]
    {
        out.par_chunks_mut(cols)
            .enumerate()
            .for_each(|(i, row)| fill(i, row));
    }
    #[cfg(not(feature = "parallel"))]
    {
        for (i, row) in out.chunks_mut(cols).enumerate() {
            fill(i, row);
        }
    }
    out
}
