//! Execution policy for the data-parallel kernels.
//!
//! Every parallel kernel in the crate goes through [`map_indexed`], which
//! collects results in index order. Combined with per-item RNG streams this
//! makes outputs independent of the worker count.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExecPolicy {
    Sequential,
    #[default]
    Parallel,
}

impl ExecPolicy {
    /// True if this build can honour [`ExecPolicy::Parallel`].
    pub fn parallel_available() -> bool {
        cfg!(feature = "parallel")
    }
}

/// Evaluates `f(0..n)` and returns the results in index order.
pub fn map_indexed<R, F>(policy: ExecPolicy, n: usize, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(usize) -> R + Sync + Send,
{
    match policy {
        #[cfg(feature = "parallel")]
        ExecPolicy::Parallel => {
            use rayon::prelude::*;
            (0..n).into_par_iter().map(f).collect()
        }
        _ => (0..n).map(f).collect(),
    }
}

/// Fallible variant of [`map_indexed`]. Returns the error of the lowest
/// failing index, so the reported error does not depend on scheduling.
pub fn try_map_indexed<R, E, F>(policy: ExecPolicy, n: usize, f: F) -> Result<Vec<R>, E>
where
    R: Send,
    E: Send,
    F: Fn(usize) -> Result<R, E> + Sync + Send,
{
    map_indexed(policy, n, f).into_iter().collect()
}
