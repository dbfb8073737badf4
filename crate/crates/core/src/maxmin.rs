//! Max-Min dispersion in O(pn log n) time and O(n) space.
//!
//! `C[k][i]` is the best minimum gap over `k` points chosen among `0..=i`
//! with the first at `0` and the last at `i`:
//!
//! ```text
//! C[2][i] = d(0, i)
//! C[k][i] = max_{j in [k-2, i-1]} min(C[k-1][j], d(j, i))
//! ```
//!
//! `C[k-1][·]` is nondecreasing and `d(·, i)` is strictly decreasing, so the
//! inner maximum sits where the two curves cross and is found by bisection.
//! Only two rows are alive at any time; an optimal selection is rebuilt from
//! the optimal value alone by a greedy walk.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::{fill_row, DpStats, Parallelism};
use crate::front::{DispersionParams, Metric, SortedFront};
use crate::oracle::{check_p, cost_of, Method, Selection, Variant};

const CHUNK: usize = 2048;

/// One row of the cost table. `values[i]` is `-inf` for `i < k - 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct DpLayer {
    pub k: usize,
    pub values: Vec<f64>,
}

impl DpLayer {
    /// First index that can host the `k`-th point.
    pub fn first_feasible(&self) -> usize {
        self.k - 1
    }
}

/// Which optimal selection the greedy walk returns.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Backtrack {
    /// Walk forward from index 0, taking the smallest admissible index.
    #[default]
    MinIndexes,
    /// Walk backward from index n-1, taking the largest admissible index.
    MaxIndexes,
}

/// Lower and upper bounds on the positions of every optimal selection that
/// contains both extremes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndexBounds {
    pub lower: Vec<usize>,
    pub upper: Vec<usize>,
}

/// Bisection for `max_{j in [lo, hi]} min(rising(j), falling(j))`, where
/// `rising` is nondecreasing and `falling` nonincreasing. Returns the better
/// of the two indices straddling the crossing (the smaller on ties) and its
/// value.
#[inline]
pub(crate) fn crossing_max(
    lo: usize,
    hi: usize,
    rising: impl Fn(usize) -> f64,
    falling: impl Fn(usize) -> f64,
) -> (usize, f64) {
    let (mut a, mut b) = (lo, hi);
    while b - a >= 2 {
        let j = a + (b - a) / 2;
        if rising(j) - falling(j) > 0.0 {
            b = j;
        } else {
            a = j;
        }
    }
    let va = rising(a).min(falling(a));
    let vb = rising(b).min(falling(b));
    if vb > va {
        (b, vb)
    } else {
        (a, va)
    }
}

#[inline]
fn cell(prev: &[f64], k: usize, i: usize, dist: impl Fn(usize, usize) -> f64) -> f64 {
    if i < k - 1 {
        return f64::NEG_INFINITY;
    }
    crossing_max(k - 2, i - 1, |j| prev[j], |j| dist(j, i)).1
}

/// `C[k][i]` from the previous row, with `k = prev.k + 1 >= 3`.
pub fn bellman_cell(
    prev: &DpLayer,
    i: usize,
    front: &SortedFront,
    params: DispersionParams,
) -> f64 {
    let k = prev.k + 1;
    assert!(k >= 3, "bellman_cell needs a previous row with k >= 2");
    let m = front.metric(params);
    cell(&prev.values, k, i, |j, i| m.d(j, i))
}

/// The recurrence on squared distances. Max and min commute with the
/// nondecreasing map to `d`, so every row maps cell by cell to the row over
/// `d`, without evaluating a root or power in the inner loop.
fn squared_layers(
    m: &Metric<'_>,
    p: usize,
    par: Parallelism,
    mut visit: impl FnMut(usize, &[f64]) + Send,
) -> (f64, DpStats) {
    let n = m.len();
    par.install(move || {
        let mut prev = vec![f64::NEG_INFINITY; n];
        for (i, v) in prev.iter_mut().enumerate().skip(1) {
            *v = m.sq(0, i);
        }
        visit(2, &prev);
        let mut cur = vec![f64::NEG_INFINITY; n];
        for k in 3..=p {
            cur[..k - 1].fill(f64::NEG_INFINITY);
            let row = &prev;
            fill_row(&mut cur[k - 1..], k - 1, CHUNK, par, |i| {
                cell(row, k, i, |j, i| m.sq(j, i))
            });
            std::mem::swap(&mut prev, &mut cur);
            visit(k, &prev);
        }
        let stats = DpStats {
            peak_live_cells: if p >= 3 { 2 * n } else { n },
            cell_bytes: std::mem::size_of::<f64>(),
            layers: p - 1,
        };
        (prev[n - 1], stats)
    })
}

/// Computes rows `2..=p`, calling `visit` on each completed row, and returns
/// the optimal value `C[p][n-1]`.
pub fn for_each_layer(
    front: &SortedFront,
    p: usize,
    params: DispersionParams,
    par: Parallelism,
    mut visit: impl FnMut(&DpLayer) + Send,
) -> Result<(f64, DpStats)> {
    check_p(p, front.len())?;
    let m = front.metric(params);
    let (opt, stats) = squared_layers(&m, p, par, |k, row| {
        let values = row
            .iter()
            .map(|&v| {
                if v == f64::NEG_INFINITY {
                    v
                } else {
                    params.from_squared(v)
                }
            })
            .collect();
        visit(&DpLayer { k, values });
    });
    Ok((params.from_squared(opt), stats))
}

/// Optimal Max-Min value, keeping two rows alive.
pub fn optimal_value(
    front: &SortedFront,
    p: usize,
    params: DispersionParams,
    par: Parallelism,
) -> Result<(f64, DpStats)> {
    check_p(p, front.len())?;
    let m = front.metric(params);
    let (opt, stats) = squared_layers(&m, p, par, |_, _| {});
    Ok((params.from_squared(opt), stats))
}

/// Smallest index in `from..to` at distance `>= opt` from `anchor`, where the
/// distance grows with the index. Returns `to` if there is none.
fn first_reaching(m: &Metric<'_>, anchor: usize, from: usize, to: usize, opt: f64) -> usize {
    let (mut lo, mut hi) = (from, to);
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        if m.d(anchor, mid) >= opt {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    lo
}

/// Rebuilds an optimal selection from the optimal value by a greedy walk,
/// in O(p log n).
pub fn backtrack_greedy(
    front: &SortedFront,
    p: usize,
    opt: f64,
    params: DispersionParams,
    direction: Backtrack,
) -> Result<Vec<usize>> {
    check_p(p, front.len())?;
    let m = front.metric(params);
    let n = m.len();
    let fail = || Error::InconsistentOptimum { p, opt };
    let mut sel = Vec::with_capacity(p);
    match direction {
        Backtrack::MinIndexes => {
            sel.push(0);
            let mut last = 0;
            for _ in 1..p - 1 {
                let next = first_reaching(&m, last, last + 1, n - 1, opt);
                if next >= n - 1 {
                    return Err(fail());
                }
                sel.push(next);
                last = next;
            }
            if m.d(last, n - 1) < opt {
                return Err(fail());
            }
            sel.push(n - 1);
        }
        Backtrack::MaxIndexes => {
            sel.push(n - 1);
            let mut last = n - 1;
            for _ in 1..p - 1 {
                // d(·, last) decreases with the index: find the first index
                // that falls short, the admissible one is just before it.
                let (mut lo, mut hi) = (1, last);
                while lo < hi {
                    let mid = lo + (hi - lo) / 2;
                    if m.d(mid, last) >= opt {
                        lo = mid + 1;
                    } else {
                        hi = mid;
                    }
                }
                if lo <= 1 {
                    return Err(fail());
                }
                last = lo - 1;
                sel.push(last);
            }
            if m.d(0, last) < opt {
                return Err(fail());
            }
            sel.push(0);
            sel.reverse();
        }
    }
    Ok(sel)
}

/// Both greedy walks; together they bound every extreme-anchored optimum.
pub fn index_bounds(
    front: &SortedFront,
    p: usize,
    opt: f64,
    params: DispersionParams,
) -> Result<IndexBounds> {
    Ok(IndexBounds {
        lower: backtrack_greedy(front, p, opt, params, Backtrack::MinIndexes)?,
        upper: backtrack_greedy(front, p, opt, params, Backtrack::MaxIndexes)?,
    })
}

/// Best middle point for three points with fixed extremes, in one pass.
fn three_point_value(m: &Metric<'_>) -> f64 {
    let n = m.len();
    let best = (1..n - 1)
        .map(|j| m.sq(0, j).min(m.sq(j, n - 1)))
        .fold(f64::NEG_INFINITY, f64::max);
    m.params().from_squared(best)
}

fn finish(
    front: &SortedFront,
    p: usize,
    opt: f64,
    params: DispersionParams,
    backtrack: Backtrack,
) -> Result<Selection> {
    let indices = backtrack_greedy(front, p, opt, params, backtrack)?;
    debug_assert_eq!(
        cost_of(&front.metric(params), &indices, Variant::MaxMin),
        opt
    );
    Ok(Selection {
        variant: Variant::MaxMin,
        p,
        indices,
        cost: opt,
        method: Method::Dp,
        secondary_cost: None,
    })
}

/// Exact Max-Min selection. `p = 2` and `p = 3` take O(n) shortcuts.
pub fn solve(
    front: &SortedFront,
    p: usize,
    params: DispersionParams,
    backtrack: Backtrack,
    par: Parallelism,
) -> Result<Selection> {
    solve_with_stats(front, p, params, backtrack, par).map(|(s, _)| s)
}

pub fn solve_with_stats(
    front: &SortedFront,
    p: usize,
    params: DispersionParams,
    backtrack: Backtrack,
    par: Parallelism,
) -> Result<(Selection, DpStats)> {
    check_p(p, front.len())?;
    let m = front.metric(params);
    let n = front.len();
    match p {
        2 => {
            let sel = finish(front, p, m.d(0, n - 1), params, backtrack)?;
            Ok((sel, DpStats::default()))
        }
        3 => {
            let sel = finish(front, p, three_point_value(&m), params, backtrack)?;
            Ok((sel, DpStats::default()))
        }
        _ => solve_dp(front, p, params, backtrack, par),
    }
}

/// The layered DP for any `p >= 2`, without the small-`p` shortcuts.
pub fn solve_dp(
    front: &SortedFront,
    p: usize,
    params: DispersionParams,
    backtrack: Backtrack,
    par: Parallelism,
) -> Result<(Selection, DpStats)> {
    let (opt, stats) = optimal_value(front, p, params, par)?;
    Ok((finish(front, p, opt, params, backtrack)?, stats))
}
