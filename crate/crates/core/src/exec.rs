//! Execution strategy for the data-parallel sweeps (mode sums, grid
//! coefficient evaluation, randomized batteries).
//!
//! With the `parallel` feature the [`Execution::Parallel`] strategy runs on
//! the rayon pool; without it both strategies run the same sequential loop.
//! Results are always collected in input order, so output is identical
//! whichever strategy is used.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Execution {
    Sequential,
    Parallel,
}

impl Default for Execution {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Execution::Parallel
        } else {
            Execution::Sequential
        }
    }
}

impl Execution {
    /// Whether this strategy actually runs on more than one thread.
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Execution::Parallel
    }

    /// Map `f` over `0..len`, preserving order.
    pub fn map_range<U, F>(self, len: usize, f: F) -> Vec<U>
    where
        U: Send,
        F: Fn(usize) -> U + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self == Execution::Parallel {
            return (0..len).into_par_iter().map(f).collect();
        }
        (0..len).map(f).collect()
    }

    /// Map `f` over a slice, preserving order.
    pub fn map_slice<T, U, F>(self, items: &[T], f: F) -> Vec<U>
    where
        T: Sync,
        U: Send,
        F: Fn(&T) -> U + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self == Execution::Parallel {
            return items.par_iter().map(f).collect();
        }
        items.iter().map(f).collect()
    }
}

/// Cap the global thread pool. Has no effect without the `parallel` feature
/// or when the pool was already initialised.
pub fn set_thread_cap(threads: usize) {
    #[cfg(feature = "parallel")]
    {
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(threads.max(1))
            .build_global();
    }
    #[cfg(not(feature = "parallel"))]
    let _ = threads;
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn strategies_agree_and_keep_order() {
        let f = |i: usize| (i as f64).sqrt() * 3.0;
        let a = Execution::Sequential.map_range(1000, f);
        let b = Execution::Parallel.map_range(1000, f);
        assert_eq!(a, b);
        let items: Vec<u32> = (0..57).collect();
        let c = Execution::Parallel.map_slice(&items, |&x| x * 2);
        assert_eq!(c, (0..57).map(|x| x * 2).collect::<Vec<_>>());
    }
}
