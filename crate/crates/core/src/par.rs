//! Map helpers over index ranges: data-parallel with the `parallel`
//! feature (rayon), plain iteration otherwise. Scan kernels in this
//! crate go through these so the sequential build stays exercisable.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Sequential map over `0..n`. Always available; benches compare this
/// against the parallel path directly.
pub fn map_seq<T: Send, F: Fn(usize) -> T + Sync + Send>(n: usize, f: F) -> Vec<T> {
    (0..n).map(f).collect()
}

#[cfg(feature = "parallel")]
pub fn map_par<T: Send, F: Fn(usize) -> T + Sync + Send>(n: usize, f: F) -> Vec<T> {
    (0..n).into_par_iter().map(f).collect()
}

/// Feature-selected map: rayon when `parallel` is enabled.
pub fn map<T: Send, F: Fn(usize) -> T + Sync + Send>(n: usize, f: F) -> Vec<T> {
    #[cfg(feature = "parallel")]
    {
        map_par(n, f)
    }
    #[cfg(not(feature = "parallel"))]
    {
        map_seq(n, f)
    }
}

/// Minimum of `f(i)` over `0..n`; NaNs are treated as +inf.
pub fn min_map<F: Fn(usize) -> f64 + Sync + Send>(n: usize, f: F) -> f64 {
    let fold = |acc: f64, v: f64| if v < acc { v } else { acc };
    #[cfg(feature = "parallel")]
    {
        (0..n)
            .into_par_iter()
            .map(&f)
            .fold(|| f64::INFINITY, fold)
            .reduce(|| f64::INFINITY, fold)
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..n).map(&f).fold(f64::INFINITY, fold)
    }
}

pub fn min_map_seq<F: Fn(usize) -> f64 + Sync>(n: usize, f: F) -> f64 {
    (0..n).map(&f).fold(f64::INFINITY, |a, v| if v < a { v } else { a })
}
