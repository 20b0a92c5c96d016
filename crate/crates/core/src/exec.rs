//! Data-parallel helpers with a sequential fallback.
//!
//! With the `parallel` feature (on by default) [`Exec::Parallel`] runs on the
//! rayon global pool; without it every mode degrades to a plain iterator.
//! Results are always returned in input order, so output never depends on
//! scheduling.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Exec {
    Sequential,
    Parallel,
}

impl Default for Exec {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Exec::Parallel
        } else {
            Exec::Sequential
        }
    }
}

impl Exec {
    pub fn map<T, R, F>(self, items: &[T], f: F) -> Vec<R>
    where
        T: Sync,
        R: Send,
        F: Fn(&T) -> R + Sync + Send,
    {
        match self {
            #[cfg(feature = "parallel")]
            Exec::Parallel => items.par_iter().map(f).collect(),
            _ => items.iter().map(f).collect(),
        }
    }

    pub fn map_range<R, F>(self, n: usize, f: F) -> Vec<R>
    where
        R: Send,
        F: Fn(usize) -> R + Sync + Send,
    {
        match self {
            #[cfg(feature = "parallel")]
            Exec::Parallel => (0..n).into_par_iter().map(f).collect(),
            _ => (0..n).map(f).collect(),
        }
    }

    /// Maps then folds with an associative `combine`; `identity` must be neutral.
    pub fn map_reduce<T, A, F, C, I>(self, items: &[T], identity: I, f: F, combine: C) -> A
    where
        T: Sync,
        A: Send,
        I: Fn() -> A + Sync + Send,
        F: Fn(&T) -> A + Sync + Send,
        C: Fn(A, A) -> A + Sync + Send,
    {
        match self {
            #[cfg(feature = "parallel")]
            Exec::Parallel => items.par_iter().map(f).reduce(identity, combine),
            _ => items.iter().map(f).fold(identity(), combine),
        }
    }

    pub fn map_reduce_range<A, F, C, I>(self, n: usize, identity: I, f: F, combine: C) -> A
    where
        A: Send,
        I: Fn() -> A + Sync + Send,
        F: Fn(usize) -> A + Sync + Send,
        C: Fn(A, A) -> A + Sync + Send,
    {
        match self {
            #[cfg(feature = "parallel")]
            Exec::Parallel => (0..n).into_par_iter().map(f).reduce(identity, combine),
            _ => (0..n).map(f).fold(identity(), combine),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn modes_agree() {
        let xs: Vec<u64> = (0..1000).collect();
        for mode in [Exec::Sequential, Exec::Parallel] {
            assert_eq!(mode.map(&xs, |x| x * 2)[999], 1998);
            assert_eq!(mode.map_reduce(&xs, || 0, |&x| x, |a, b| a + b), 499_500);
            assert_eq!(mode.map_range(5, |i| i * i), vec![0, 1, 4, 9, 16]);
            assert_eq!(
                mode.map_reduce_range(10, || 0usize, |i| i, |a, b| a + b),
                45
            );
        }
    }
}
