//! Execution strategy for the per-feature sweeps.
//!
//! Every sweep in this crate is a map over independent features followed by
//! an order-independent reduction (elementwise max). [`Exec::Parallel`] fans
//! the map out over the rayon pool when the `parallel` feature is enabled and
//! silently degrades to the sequential loop otherwise, so results never depend
//! on the strategy.

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Exec {
    Sequential,
    #[default]
    Parallel,
}

impl Exec {
    /// Whether this build can actually run work in parallel.
    pub const fn parallel_available() -> bool {
        cfg!(feature = "parallel")
    }

    /// Maps `f` over `0..n` and folds the results with `reduce`, starting from
    /// `identity`. `reduce` must be associative and commutative.
    pub(crate) fn map_reduce<T, M, R, I>(self, n: usize, identity: I, map: M, reduce: R) -> T
    where
        T: Send,
        I: Fn() -> T + Sync + Send,
        M: Fn(usize) -> T + Sync + Send,
        R: Fn(T, T) -> T + Sync + Send,
    {
        match self {
            #[cfg(feature = "parallel")]
            Exec::Parallel => {
                use rayon::prelude::*;
                (0..n).into_par_iter().map(map).reduce(identity, reduce)
            }
            _ => (0..n).map(map).fold(identity(), reduce),
        }
    }
}

/// Elementwise max of two equally long vectors, reusing the left buffer.
pub(crate) fn max_merge(mut acc: Vec<f64>, other: Vec<f64>) -> Vec<f64> {
    if acc.is_empty() {
        return other;
    }
    if other.is_empty() {
        return acc;
    }
    debug_assert_eq!(acc.len(), other.len());
    for (a, b) in acc.iter_mut().zip(other) {
        if b > *a {
            *a = b;
        }
    }
    acc
}
