//! Max-Sum-Neighbor dispersion: maximize the summed gaps between consecutive
//! selected points, in O(pn²) time.
//!
//! ```text
//! C[2][i] = d(0, i)
//! C[k][i] = max_{j in [k-2, i-1]} C[k-1][j] + d(j, i)
//! OPT     = max_{j in [p-2, n-2]} C[p-1][j] + d(j, n-1)
//! ```
//!
//! Every optimal selection contains both extremes, so the first point is
//! pinned at `0` and the last at `n - 1`.

use crate::error::Result;
use crate::exec::{fill_row, DpStats, Parallelism};
use crate::front::{DispersionParams, Metric, SortedFront};
use crate::oracle::{check_p, Method, Selection, Variant};

const CHUNK: usize = 64;

/// Rows `C[2..=p-1]` of the cost table, kept for backtracking.
#[derive(Debug, Clone, PartialEq)]
pub struct MsnTable {
    rows: Vec<Vec<f64>>,
}

impl MsnTable {
    /// Row `C[k]`, for `2 <= k <= p - 1`.
    pub fn row(&self, k: usize) -> &[f64] {
        &self.rows[k - 2]
    }

    pub fn row_count(&self) -> usize {
        self.rows.len()
    }

    pub fn cell_count(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }
}

/// `max_{j in lo..hi} prev[j] + d(j, i)`; `-inf` for an empty range.
#[inline]
fn best_extension(prev: &[f64], lo: usize, hi: usize, i: usize, m: &Metric<'_>) -> f64 {
    // Four independent maxima; max does not depend on evaluation order.
    let mut acc = [f64::NEG_INFINITY; 4];
    let mut j = lo;
    while j + 4 <= hi {
        for (t, a) in acc.iter_mut().enumerate() {
            let v = prev[j + t] + m.d(j + t, i);
            if v > *a {
                *a = v;
            }
        }
        j += 4;
    }
    for (j, &pj) in prev.iter().enumerate().take(hi).skip(j) {
        let v = pj + m.d(j, i);
        if v > acc[0] {
            acc[0] = v;
        }
    }
    acc.into_iter().fold(f64::NEG_INFINITY, f64::max)
}

/// Smallest `j in lo..hi` attaining [`best_extension`].
fn argmax_extension(prev: &[f64], lo: usize, hi: usize, i: usize, m: &Metric<'_>) -> usize {
    let best = best_extension(prev, lo, hi, i, m);
    (lo..hi)
        .find(|&j| prev[j] + m.d(j, i) == best)
        .expect("range is nonempty")
}

fn first_row(m: &Metric<'_>) -> Vec<f64> {
    let mut row = vec![f64::NEG_INFINITY; m.len()];
    for (i, v) in row.iter_mut().enumerate().skip(1) {
        *v = m.d(0, i);
    }
    row
}

fn next_row(prev: &[f64], k: usize, out: &mut [f64], m: &Metric<'_>, par: Parallelism) {
    out[..k - 1].fill(f64::NEG_INFINITY);
    fill_row(&mut out[k - 1..], k - 1, CHUNK, par, |i| {
        best_extension(prev, k - 2, i, i, m)
    });
}

/// Builds rows `2..=p-1`.
pub fn build_table(
    front: &SortedFront,
    p: usize,
    params: DispersionParams,
    par: Parallelism,
) -> Result<MsnTable> {
    check_p(p, front.len())?;
    let m = front.metric(params);
    let n = m.len();
    Ok(par.install(move || {
        let mut rows = Vec::with_capacity(p.saturating_sub(2));
        if p > 2 {
            rows.push(first_row(&m));
        }
        for k in 3..p {
            let mut out = vec![0.0; n];
            next_row(rows.last().expect("row 2 exists"), k, &mut out, &m, par);
            rows.push(out);
        }
        MsnTable { rows }
    }))
}

fn final_value(last_row: &[f64], p: usize, m: &Metric<'_>) -> f64 {
    let n = m.len();
    best_extension(last_row, p - 2, n - 1, n - 1, m)
}

/// Exact Max-Sum-Neighbor selection; `p = 2` and `p = 3` take O(n) shortcuts.
pub fn solve(
    front: &SortedFront,
    p: usize,
    params: DispersionParams,
    par: Parallelism,
) -> Result<Selection> {
    solve_with_stats(front, p, params, par).map(|(s, _)| s)
}

pub fn solve_with_stats(
    front: &SortedFront,
    p: usize,
    params: DispersionParams,
    par: Parallelism,
) -> Result<(Selection, DpStats)> {
    check_p(p, front.len())?;
    let m = front.metric(params);
    let n = m.len();
    match p {
        2 => Ok((selection(vec![0, n - 1], m.d(0, n - 1)), DpStats::default())),
        3 => {
            let mut best = (0, f64::NEG_INFINITY);
            for j in 1..n - 1 {
                let v = m.d(0, j) + m.d(j, n - 1);
                if v > best.1 {
                    best = (j, v);
                }
            }
            Ok((
                selection(vec![0, best.0, n - 1], best.1),
                DpStats::default(),
            ))
        }
        _ => solve_dp(front, p, params, par),
    }
}

/// Full-table DP with backtracking, for any `p >= 2`.
pub fn solve_dp(
    front: &SortedFront,
    p: usize,
    params: DispersionParams,
    par: Parallelism,
) -> Result<(Selection, DpStats)> {
    check_p(p, front.len())?;
    let m = front.metric(params);
    let n = m.len();
    if p == 2 {
        return Ok((selection(vec![0, n - 1], m.d(0, n - 1)), DpStats::default()));
    }
    let table = build_table(front, p, params, par)?;
    let opt = final_value(table.row(p - 1), p, &m);

    let mut indices = vec![0; p];
    indices[p - 1] = n - 1;
    let mut i = n - 1;
    for k in (3..=p).rev() {
        let j = argmax_extension(table.row(k - 1), k - 2, i, i, &m);
        indices[k - 2] = j;
        i = j;
    }
    let stats = DpStats {
        peak_live_cells: table.cell_count(),
        cell_bytes: std::mem::size_of::<f64>(),
        layers: table.row_count(),
    };
    Ok((selection(indices, opt), stats))
}

/// Optimal value only, keeping two rows alive.
pub fn solve_value_only(
    front: &SortedFront,
    p: usize,
    params: DispersionParams,
    par: Parallelism,
) -> Result<(f64, DpStats)> {
    check_p(p, front.len())?;
    let m = front.metric(params);
    let n = m.len();
    if p == 2 {
        return Ok((m.d(0, n - 1), DpStats::default()));
    }
    let value = par.install(move || {
        let mut prev = first_row(&m);
        let mut cur = vec![0.0; n];
        for k in 3..p {
            next_row(&prev, k, &mut cur, &m, par);
            std::mem::swap(&mut prev, &mut cur);
        }
        final_value(&prev, p, &m)
    });
    let stats = DpStats {
        peak_live_cells: if p > 3 { 2 * n } else { n },
        cell_bytes: std::mem::size_of::<f64>(),
        layers: p - 2,
    };
    Ok((value, stats))
}

fn selection(indices: Vec<usize>, cost: f64) -> Selection {
    Selection {
        variant: Variant::MaxSumNeighbor,
        p: indices.len(),
        indices,
        cost,
        method: Method::Dp,
        secondary_cost: None,
    }
}
