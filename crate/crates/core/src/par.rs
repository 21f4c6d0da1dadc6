// SPDX-License-Identifier: MIT OR Apache-2.0
//! Order-preserving data-parallel map. With the `parallel` feature off, or with
//! sequential mode forced at runtime, everything runs on the calling thread.

use std::sync::atomic::{AtomicBool, Ordering};

static FORCE_SEQUENTIAL: AtomicBool = AtomicBool::new(false);

/// Forces (or releases) the sequential path at runtime.
pub fn force_sequential(on: bool) {
    FORCE_SEQUENTIAL.store(on, Ordering::SeqCst);
}

pub fn is_parallel() -> bool {
    cfg!(feature = "parallel") && !FORCE_SEQUENTIAL.load(Ordering::SeqCst)
}

/// Sizes the global worker pool. `1` selects the sequential path.
pub fn set_threads(n: usize) {
    if n == 1 {
        force_sequential(true);
        return;
    }
    #[cfg(feature = "parallel")]
    {
        // A second call finds the pool already built; the first size wins.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
}

/// `items.iter().map(f).collect()`, in parallel when enabled. Output order matches input order.
pub fn map<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if is_parallel() {
        use rayon::prelude::*;
        return items.par_iter().map(f).collect();
    }
    items.iter().map(f).collect()
}

/// Fallible [`map`]; the first error in input order is returned.
pub fn try_map<T, R, E, F>(items: &[T], f: F) -> Result<Vec<R>, E>
where
    T: Sync,
    R: Send,
    E: Send,
    F: Fn(&T) -> Result<R, E> + Sync + Send,
{
    map(items, f).into_iter().collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_is_preserved() {
        let v: Vec<u64> = (0..1000).collect();
        assert_eq!(map(&v, |x| x * x), v.iter().map(|x| x * x).collect::<Vec<_>>());
    }

    #[test]
    fn first_error_wins() {
        let v: Vec<i32> = (0..100).collect();
        let r: Result<Vec<i32>, i32> = try_map(&v, |&x| if x % 7 == 3 { Err(x) } else { Ok(x) });
        assert_eq!(r, Err(3));
    }
}
