//! Execution strategy for per-point work.
//!
//! With the `parallel` feature (default) [`Strategy::Parallel`] fans work out
//! over the rayon pool. Without it both strategies run on the calling thread,
//! so callers never need their own `cfg` switches.

/// How independent per-item work is scheduled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Strategy {
    Sequential,
    #[default]
    Parallel,
}

impl Strategy {
    /// Whether this strategy actually runs on more than one thread in this build.
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Strategy::Parallel
    }
}

/// Maps `f` over `0..n`, preserving index order in the output.
pub fn map_indices<T, F>(strategy: Strategy, n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        if strategy.is_parallel() {
            use rayon::prelude::*;
            return (0..n).into_par_iter().map(f).collect();
        }
    }
    let _ = strategy;
    (0..n).map(f).collect()
}

/// Fallible variant of [`map_indices`]; returns the error of the lowest failing index.
pub fn try_map_indices<T, E, F>(strategy: Strategy, n: usize, f: F) -> Result<Vec<T>, E>
where
    T: Send,
    E: Send,
    F: Fn(usize) -> Result<T, E> + Sync + Send,
{
    map_indices(strategy, n, f).into_iter().collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn both_strategies_preserve_order() {
        let seq = map_indices(Strategy::Sequential, 1000, |i| i * i);
        let par = map_indices(Strategy::Parallel, 1000, |i| i * i);
        assert_eq!(seq, par);
        assert_eq!(seq[31], 961);
    }

    #[test]
    fn first_error_wins() {
        let r: Result<Vec<usize>, usize> = try_map_indices(Strategy::Parallel, 100, |i| {
            if i % 7 == 3 {
                Err(i)
            } else {
                Ok(i)
            }
        });
        assert_eq!(r, Err(3));
    }
}
