//! Data-parallel helpers with a sequential fallback.
//!
//! With the `parallel` feature (default) the helpers dispatch to rayon unless
//! parallelism has been switched off at runtime with [`set_parallel`]. All
//! reductions are index-ordered, so results do not depend on the mode.

use std::sync::atomic::{AtomicBool, Ordering};

static PARALLEL: AtomicBool = AtomicBool::new(cfg!(feature = "parallel"));

/// Enable or disable parallel execution. Has no effect without the
/// `parallel` feature.
pub fn set_parallel(enabled: bool) {
    PARALLEL.store(enabled && cfg!(feature = "parallel"), Ordering::Relaxed);
}

pub fn is_parallel() -> bool {
    PARALLEL.load(Ordering::Relaxed)
}

/// `(0..n).map(f).collect()`, in parallel when enabled. Output order is index order.
pub fn map_indexed<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if is_parallel() {
        use rayon::prelude::*;
        return (0..n).into_par_iter().map(f).collect();
    }
    (0..n).map(f).collect()
}

/// Smallest value of `f` over `0..n`; ties go to the smaller index.
/// NaN values are never selected.
pub fn argmin<F>(n: usize, f: F) -> Option<(usize, f64)>
where
    F: Fn(usize) -> f64 + Sync + Send,
{
    fn pick(a: Option<(usize, f64)>, b: Option<(usize, f64)>) -> Option<(usize, f64)> {
        match (a, b) {
            (None, x) | (x, None) => x,
            (Some(x), Some(y)) => {
                if y.1 < x.1 || (y.1 == x.1 && y.0 < x.0) {
                    Some(y)
                } else {
                    Some(x)
                }
            }
        }
    }
    let lift = |i: usize| {
        let v = f(i);
        if v.is_nan() {
            None
        } else {
            Some((i, v))
        }
    };
    #[cfg(feature = "parallel")]
    if is_parallel() && n >= 64 {
        use rayon::prelude::*;
        return (0..n).into_par_iter().map(lift).reduce(|| None, pick);
    }
    (0..n).map(lift).fold(None, pick)
}

/// Largest value of `f` over `0..n` (NaN ignored); `None` for `n == 0`.
pub fn max<F>(n: usize, f: F) -> Option<f64>
where
    F: Fn(usize) -> f64 + Sync + Send,
{
    argmin(n, |i| -f(i)).map(|(_, v)| -v)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn argmin_breaks_ties_by_index() {
        let vals = [3.0, 1.0, 2.0, 1.0];
        assert_eq!(argmin(4, |i| vals[i]), Some((1, 1.0)));
        let many: Vec<f64> = (0..1000).map(|i| (i % 7) as f64).collect();
        assert_eq!(argmin(many.len(), |i| many[i]), Some((0, 0.0)));
    }

    #[test]
    fn argmin_skips_nan_and_empty() {
        assert_eq!(argmin(0, |_| 0.0), None);
        let vals = [f64::NAN, 2.0];
        assert_eq!(argmin(2, |i| vals[i]), Some((1, 2.0)));
    }

    #[test]
    fn map_preserves_order() {
        assert_eq!(map_indexed(5, |i| i * i), vec![0, 1, 4, 9, 16]);
    }
}
