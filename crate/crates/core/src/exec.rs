//! Layer-parallel execution of DP rows.
//!
//! Every cell of row `k` depends only on row `k - 1`, so a row is filled by
//! independent workers and the solver waits for the row to finish before
//! starting the next one. Each cell is written by exactly one worker with the
//! same arithmetic as the sequential loop, so results do not depend on the
//! thread count.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Worker count for DP row evaluation. `0` means all available cores.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Parallelism {
    threads: usize,
}

impl Parallelism {
    pub const fn sequential() -> Self {
        Self { threads: 1 }
    }

    pub const fn all_cores() -> Self {
        Self { threads: 0 }
    }

    pub const fn threads(threads: usize) -> Self {
        Self { threads }
    }

    pub fn thread_count(&self) -> usize {
        self.threads
    }

    pub fn is_sequential(&self) -> bool {
        self.threads == 1
    }

    /// Runs `f` inside a pool of the requested size.
    pub(crate) fn install<R: Send>(&self, f: impl FnOnce() -> R + Send) -> R {
        match self.threads {
            0 | 1 => f(),
            k => match rayon::ThreadPoolBuilder::new().num_threads(k).build() {
                Ok(pool) => pool.install(f),
                Err(_) => f(),
            },
        }
    }
}

impl Default for Parallelism {
    fn default() -> Self {
        Self::sequential()
    }
}

/// Memory accounting for one solve.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DpStats {
    /// Largest number of DP cells alive at the same time.
    pub peak_live_cells: usize,
    /// Bytes per cell, for turning the cell count into a memory estimate.
    pub cell_bytes: usize,
    /// Rows of the DP that were computed.
    pub layers: usize,
}

impl DpStats {
    pub fn peak_bytes(&self) -> usize {
        self.peak_live_cells * self.cell_bytes
    }
}

/// Fills `out[t] = cell(first + t)`. Chunks are handed to workers starting
/// from the highest index, where cells cost the most.
pub(crate) fn fill_row<T, F>(out: &mut [T], first: usize, chunk: usize, par: Parallelism, cell: F)
where
    T: Send,
    F: Fn(usize) -> T + Sync,
{
    if par.is_sequential() || out.len() <= chunk || rayon::current_num_threads() == 1 {
        for (t, slot) in out.iter_mut().enumerate() {
            *slot = cell(first + t);
        }
        return;
    }
    out.par_chunks_mut(chunk)
        .enumerate()
        .rev()
        .with_max_len(1)
        .for_each(|(c, block)| {
            let base = first + c * chunk;
            for (t, slot) in block.iter_mut().enumerate() {
                *slot = cell(base + t);
            }
        });
}

/// Applies `work` to a list of disjoint rows, largest index first.
pub(crate) fn for_each_row<R, F>(rows: Vec<R>, par: Parallelism, work: F)
where
    R: Send,
    F: Fn(R) + Sync,
{
    if par.is_sequential() || rayon::current_num_threads() == 1 {
        rows.into_iter().rev().for_each(work);
    } else {
        rows.into_par_iter().rev().with_max_len(1).for_each(&work);
    }
}
