//! Execution helpers for the data-parallel lattice loops.
//!
//! With the `parallel` feature (default) these fan out over rayon; without
//! it they fall back to plain iteration. Exact rational addition is
//! associative and commutative, so both paths return bit-identical results.

use crate::scalar::Rat;
use num_traits::Zero;

/// Cap the global worker count. Call once, early; later calls are ignored.
/// A no-op without the `parallel` feature.
pub fn configure_threads(n: usize) {
    #[cfg(feature = "parallel")]
    {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    #[cfg(not(feature = "parallel"))]
    {
        let _ = n;
    }
}

/// Human-readable name of the compiled execution mode.
pub fn execution_mode() -> &'static str {
    if cfg!(feature = "parallel") {
        "parallel"
    } else {
        "sequential"
    }
}

/// Exact sum of `f` over `items`.
pub fn sum_rat<T, F>(items: &[T], f: F) -> Rat
where
    T: Sync,
    F: Fn(&T) -> Rat + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        items.par_iter().map(&f).reduce(Rat::zero, |a, b| a + b)
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.iter().map(&f).fold(Rat::zero(), |a, b| a + b)
    }
}

/// Map `f` over `items`, preserving order.
pub fn map_vec<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        items.par_iter().map(&f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.iter().map(&f).collect()
    }
}
