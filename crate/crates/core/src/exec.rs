//! Execution strategy for the data-parallel loops (vertex scans, batch
//! limit evaluation, evidence checks).
//!
//! With the `parallel` feature (default) [`Execution::Parallel`] runs on the
//! rayon global pool; without it every strategy runs sequentially. Results
//! never depend on the strategy: all reductions are exact and
//! order-independent.

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
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
    /// Whether this strategy actually runs in parallel in this build.
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Execution::Parallel
    }
}

/// Maps `0..len` and combines with an associative `reduce`.
pub fn map_reduce<R, M, F>(exec: Execution, len: usize, identity: R, map: M, reduce: F) -> R
where
    R: Send + Sync + Clone,
    M: Fn(usize) -> R + Sync + Send,
    F: Fn(R, R) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec.is_parallel() {
        use rayon::prelude::*;
        return (0..len)
            .into_par_iter()
            .map(&map)
            .reduce(|| identity.clone(), &reduce);
    }
    let _ = exec;
    (0..len).map(map).fold(identity, reduce)
}

/// Order-preserving map over a slice.
pub fn map_collect<T, R, M>(exec: Execution, items: &[T], map: M) -> Vec<R>
where
    T: Sync,
    R: Send,
    M: Fn(&T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec.is_parallel() {
        use rayon::prelude::*;
        return items.par_iter().map(map).collect();
    }
    let _ = exec;
    items.iter().map(map).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn strategies_agree() {
        for exec in [Execution::Sequential, Execution::Parallel] {
            let s = map_reduce(exec, 1000, 0u64, |i| (i * i) as u64, |a, b| a + b);
            assert_eq!(s, 332_833_500);
            let v = map_collect(exec, &[3, 1, 2], |x| x * 10);
            assert_eq!(v, vec![30, 10, 20]);
        }
    }
}
