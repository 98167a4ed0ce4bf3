//! Runtime switch between sequential and rayon execution.
//!
//! The data-parallel hot spots (quadrature subdivision, PSD grids, Monte
//! Carlo trajectory batches) take a [`Parallelism`] value, so the same build
//! can run either path; the `parallel` cargo feature only controls whether
//! rayon is compiled in. Results are combined in a fixed tree order, so the
//! two paths are bit-identical.

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parallelism {
    Sequential,
    #[cfg(feature = "parallel")]
    Rayon,
}

impl Default for Parallelism {
    fn default() -> Self {
        #[cfg(feature = "parallel")]
        {
            Parallelism::Rayon
        }
        #[cfg(not(feature = "parallel"))]
        {
            Parallelism::Sequential
        }
    }
}

/// Run two closures, possibly on different threads, returning both results.
pub fn join<A, B>(
    par: Parallelism,
    fa: impl FnOnce() -> A + Send,
    fb: impl FnOnce() -> B + Send,
) -> (A, B)
where
    A: Send,
    B: Send,
{
    match par {
        Parallelism::Sequential => (fa(), fb()),
        #[cfg(feature = "parallel")]
        Parallelism::Rayon => rayon::join(fa, fb),
    }
}

/// Map over indices 0..n, preserving order in the output.
pub fn map_indexed<U: Send>(
    par: Parallelism,
    n: usize,
    f: impl Fn(usize) -> U + Sync + Send,
) -> Vec<U> {
    match par {
        Parallelism::Sequential => (0..n).map(f).collect(),
        #[cfg(feature = "parallel")]
        Parallelism::Rayon => {
            use rayon::prelude::*;
            (0..n).into_par_iter().map(f).collect()
        }
    }
}

/// Map over a slice, preserving order.
pub fn map_slice<T: Sync, U: Send>(
    par: Parallelism,
    items: &[T],
    f: impl Fn(&T) -> U + Sync + Send,
) -> Vec<U> {
    match par {
        Parallelism::Sequential => items.iter().map(f).collect(),
        #[cfg(feature = "parallel")]
        Parallelism::Rayon => {
            use rayon::prelude::*;
            items.par_iter().map(f).collect()
        }
    }
}
