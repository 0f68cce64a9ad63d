//! Grid evaluation helpers.
//!
//! Experiment drivers map an independent evaluation over every point of a
//! time grid. With the `parallel` feature (on by default) `map_grid` runs
//! on the rayon thread pool; without it the same call degrades to the
//! sequential loop. `map_grid_seq` is always sequential, so the two
//! strategies can be compared in one build (see benches/grid.rs). Output
//! order always matches input order.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[cfg(feature = "parallel")]
pub fn map_grid<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    items.par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub fn map_grid<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    F: Fn(&T) -> U,
{
    items.iter().map(f).collect()
}

/// Sequential reference implementation of `map_grid`.
pub fn map_grid_seq<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    F: Fn(&T) -> U,
{
    items.iter().map(f).collect()
}
