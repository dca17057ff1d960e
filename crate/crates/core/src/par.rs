//! Data-parallel helpers with a sequential fallback.
//!
//! With the `parallel` feature the default [`Exec`] runs on rayon's global
//! pool. Every helper returns the same value under both strategies: maps
//! preserve input order and reductions only use order-independent
//! operations (`max`, first-index argmin).

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Smallest per-task slice for cheap reductions.
const MIN_CHUNK: usize = 256;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Exec {
    #[cfg_attr(feature = "parallel", default)]
    Parallel,
    #[cfg_attr(not(feature = "parallel"), default)]
    Sequential,
}

impl Exec {
    fn parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Exec::Parallel
    }
}

/// Order-preserving map over `0..n`.
pub fn map_range<T, F>(exec: Exec, n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec.parallel() {
        return (0..n).into_par_iter().map(f).collect();
    }
    let _ = exec;
    (0..n).map(f).collect()
}

/// Order-preserving map over a slice.
pub fn map<S, T, F>(exec: Exec, items: &[S], f: F) -> Vec<T>
where
    S: Sync,
    T: Send,
    F: Fn(&S) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec.parallel() {
        return items.par_iter().map(f).collect();
    }
    let _ = exec;
    items.iter().map(f).collect()
}

/// Maximum of `f(i)` over `0..n` (NaN-free inputs assumed); `None` for `n = 0`.
pub fn max_range<F>(exec: Exec, n: usize, f: F) -> Option<f64>
where
    F: Fn(usize) -> f64 + Sync + Send,
{
    if n == 0 {
        return None;
    }
    #[cfg(feature = "parallel")]
    if exec.parallel() {
        return (0..n).into_par_iter().with_min_len(MIN_CHUNK).map(f).reduce_with(f64::max);
    }
    let _ = exec;
    (0..n).map(f).reduce(f64::max)
}

/// Smallest `f(i)` with ties resolved to the lowest index.
pub fn argmin_range<F>(exec: Exec, n: usize, f: F) -> Option<(usize, f64)>
where
    F: Fn(usize) -> f64 + Sync + Send,
{
    let pick = |a: (usize, f64), b: (usize, f64)| {
        if b.1 < a.1 || (b.1 == a.1 && b.0 < a.0) {
            b
        } else {
            a
        }
    };
    #[cfg(feature = "parallel")]
    if exec.parallel() {
        return (0..n).into_par_iter().map(|i| (i, f(i))).reduce_with(pick);
    }
    let _ = exec;
    (0..n).map(|i| (i, f(i))).reduce(pick)
}

/// Lowest index `i` with `pred(i)`.
pub fn first_index<F>(exec: Exec, n: usize, pred: F) -> Option<usize>
where
    F: Fn(usize) -> bool + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec.parallel() {
        return (0..n).into_par_iter().find_first(|&i| pred(i));
    }
    let _ = exec;
    (0..n).find(|&i| pred(i))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn strategies_agree() {
        let f = |i: usize| ((i * 7919) % 113) as f64 - 50.0;
        for exec in [Exec::Parallel, Exec::Sequential] {
            assert_eq!(max_range(exec, 1000, f), Some(62.0));
            let (i, v) = argmin_range(exec, 1000, f).unwrap();
            assert_eq!(v, -50.0);
            assert_eq!(i, 0);
            assert_eq!(first_index(exec, 1000, |i| f(i) > 60.0), (0..1000).find(|&i| f(i) > 60.0));
            assert_eq!(map_range(exec, 4, |i| i * 2), vec![0, 2, 4, 6]);
        }
        assert_eq!(max_range(Exec::default(), 0, f), None);
    }
}
