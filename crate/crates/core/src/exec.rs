//! Execution policy for the data-parallel inner loops.
//!
//! With the `parallel` feature (default) element-wise kernels over Fourier
//! modes and independent solves/trajectories can run on the rayon pool.
//! Without it, or with [`ExecPolicy::Sequential`], everything runs on the
//! calling thread. Only element-wise maps are parallelized; reductions stay
//! sequential so results are bit-identical under both policies.

use serde::{Deserialize, Serialize};

/// Below this many elements a parallel map is never worth the fork/join.
pub const PAR_MIN_LEN: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExecPolicy {
    Sequential,
    Parallel,
}

impl Default for ExecPolicy {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            ExecPolicy::Parallel
        } else {
            ExecPolicy::Sequential
        }
    }
}

impl ExecPolicy {
    /// Whether a loop of length `len` should be split across threads.
    #[inline]
    pub fn splits(self, len: usize) -> bool {
        cfg!(feature = "parallel") && self == ExecPolicy::Parallel && len >= PAR_MIN_LEN
    }

    /// `out[i] = f(i, out[i])` for every index.
    pub fn for_each_indexed<T, F>(self, out: &mut [T], f: F)
    where
        T: Send,
        F: Fn(usize, &mut T) + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self.splits(out.len()) {
            use rayon::prelude::*;
            out.par_iter_mut().enumerate().for_each(|(i, v)| f(i, v));
            return;
        }
        out.iter_mut().enumerate().for_each(|(i, v)| f(i, v));
    }

    /// Build a vector of length `len` from `f(i)`.
    pub fn collect_indexed<T, F>(self, len: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self.splits(len) {
            use rayon::prelude::*;
            return (0..len).into_par_iter().map(f).collect();
        }
        (0..len).map(f).collect()
    }

    /// Map independent jobs (solves, trajectories). Order is preserved.
    pub fn map_jobs<I, T, F>(self, items: Vec<I>, f: F) -> Vec<T>
    where
        I: Send,
        T: Send,
        F: Fn(I) -> T + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self == ExecPolicy::Parallel && items.len() > 1 {
            use rayon::prelude::*;
            return items.into_par_iter().map(f).collect();
        }
        items.into_iter().map(f).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn policies_agree_bitwise() {
        let f = |i: usize| ((i as f64) * 0.37).sin().exp();
        let a = ExecPolicy::Sequential.collect_indexed(10_000, f);
        let b = ExecPolicy::Parallel.collect_indexed(10_000, f);
        assert!(a.iter().zip(&b).all(|(x, y)| x.to_bits() == y.to_bits()));
    }

    #[test]
    fn map_jobs_preserves_order() {
        let out = ExecPolicy::Parallel.map_jobs((0..16).collect(), |i: i32| i * i);
        assert_eq!(out, (0..16).map(|i| i * i).collect::<Vec<_>>());
    }
}
