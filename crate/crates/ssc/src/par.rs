//! Data-parallel helpers with a sequential fallback.
//!
//! Every hot sampling or grid loop in the crate funnels through these
//! functions. With the `parallel` feature (default) they run on rayon;
//! without it they run sequentially. The `_seq` variants are always
//! available so benchmarks can compare both paths in one build.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Map `0..n` through `f`, preserving index order.
pub fn map_indexed<R: Send>(n: usize, f: impl Fn(usize) -> R + Sync + Send) -> Vec<R> {
    #[cfg(feature = "parallel")]
    {
        map_indexed_par(n, f)
    }
    #[cfg(not(feature = "parallel"))]
    {
        map_indexed_seq(n, f)
    }
}

pub fn map_indexed_seq<R>(n: usize, f: impl Fn(usize) -> R) -> Vec<R> {
    (0..n).map(f).collect()
}

#[cfg(feature = "parallel")]
pub fn map_indexed_par<R: Send>(n: usize, f: impl Fn(usize) -> R + Sync + Send) -> Vec<R> {
    (0..n).into_par_iter().map(f).collect()
}

/// Minimum of `f` over `0..n`; `f64::INFINITY` when `n == 0`.
pub fn min_f64(n: usize, f: impl Fn(usize) -> f64 + Sync + Send) -> f64 {
    #[cfg(feature = "parallel")]
    {
        min_f64_par(n, f)
    }
    #[cfg(not(feature = "parallel"))]
    {
        min_f64_seq(n, f)
    }
}

pub fn min_f64_seq(n: usize, f: impl Fn(usize) -> f64) -> f64 {
    (0..n).map(f).fold(f64::INFINITY, f64::min)
}

#[cfg(feature = "parallel")]
pub fn min_f64_par(n: usize, f: impl Fn(usize) -> f64 + Sync + Send) -> f64 {
    (0..n)
        .into_par_iter()
        .map(f)
        .reduce(|| f64::INFINITY, f64::min)
}

/// Maximum of `f` over `0..n`; `f64::NEG_INFINITY` when `n == 0`.
pub fn max_f64(n: usize, f: impl Fn(usize) -> f64 + Sync + Send) -> f64 {
    #[cfg(feature = "parallel")]
    {
        (0..n)
            .into_par_iter()
            .map(f)
            .reduce(|| f64::NEG_INFINITY, f64::max)
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..n).map(f).fold(f64::NEG_INFINITY, f64::max)
    }
}

/// First violation by index order, or `None`.
pub fn find_violation<V: Send>(n: usize, f: impl Fn(usize) -> Option<V> + Sync + Send) -> Option<V> {
    #[cfg(feature = "parallel")]
    {
        (0..n).into_par_iter().find_map_first(f)
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..n).find_map(f)
    }
}
