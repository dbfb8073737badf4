//! Max-Sum-Min dispersion: maximize the sum over selected points of the
//! distance to the nearest selected neighbor, in O(pn³) time and O(pn²) space.
//!
//! On a sorted front a point's nearest selected point is one of its two
//! neighbors in the selection, so the objective of `s_0 < … < s_{p-1}` is
//!
//! ```text
//! d(s_0, s_1) + Σ_{0<t<p-1} min(d(s_{t-1}, s_t), d(s_t, s_{t+1})) + d(s_{p-2}, s_{p-1})
//! ```
//!
//! The state is the last selected pair `(a, b)`. The contribution of `b` is
//! only known once the next point `c` is chosen, so it is left out of
//! `V[k][a][b]` and added by the transition:
//!
//! ```text
//! V[2][0][b]   = d(0, b)
//! V[k+1][b][c] = max_{a < b} V[k][a][b] + min(d(a, b), d(b, c))
//! OPT          = max_a V[p][a][n-1] + d(a, n-1)
//! ```
//!
//! The first point is pinned at `0` and the last at `n - 1`; some optimal
//! selection always contains both extremes.

use crate::error::Result;
use crate::exec::{for_each_row, DpStats, Parallelism};
use crate::front::{DispersionParams, Metric, SortedFront};
use crate::oracle::{check_p, cost_of, Method, Selection, Variant};

/// Strictly upper-triangular `n x n` storage, row-major in the first index.
#[derive(Debug, Clone, PartialEq)]
struct Triangle {
    n: usize,
    cells: Vec<f64>,
}

impl Triangle {
    fn new(n: usize) -> Self {
        Self {
            n,
            cells: vec![f64::NEG_INFINITY; n * (n - 1) / 2],
        }
    }

    #[inline]
    fn offset(&self, a: usize) -> usize {
        a * (self.n - 1) - a * a.saturating_sub(1) / 2
    }

    #[inline]
    fn get(&self, a: usize, b: usize) -> f64 {
        debug_assert!(a < b && b < self.n);
        self.cells[self.offset(a) + (b - a - 1)]
    }

    /// Disjoint mutable rows `(a, cells (a, a+1..n))`.
    fn rows_mut(&mut self) -> Vec<(usize, &mut [f64])> {
        let n = self.n;
        let mut rest = self.cells.as_mut_slice();
        let mut rows = Vec::with_capacity(n);
        for a in 0..n.saturating_sub(1) {
            let (row, tail) = rest.split_at_mut(n - 1 - a);
            rows.push((a, row));
            rest = tail;
        }
        rows
    }
}

/// Range of predecessors `a` for cells `(·, b)` of layer `k + 1`, read from
/// layer `k`.
#[inline]
fn predecessor_range(k: usize, b: usize) -> (usize, usize) {
    if k == 2 {
        (0, b.min(1))
    } else {
        (k - 2, b)
    }
}

/// `max_t w[t] + min(dab[t], dbc)`.
#[inline]
fn best_transition(w: &[f64], dab: &[f64], dbc: f64) -> f64 {
    let mut acc = [f64::NEG_INFINITY; 4];
    let mut wc = w.chunks_exact(4);
    let mut dc = dab.chunks_exact(4);
    for (ws, ds) in (&mut wc).zip(&mut dc) {
        for t in 0..4 {
            let v = ws[t] + ds[t].min(dbc);
            if v > acc[t] {
                acc[t] = v;
            }
        }
    }
    for (&wv, &dv) in wc.remainder().iter().zip(dc.remainder()) {
        let v = wv + dv.min(dbc);
        if v > acc[0] {
            acc[0] = v;
        }
    }
    acc.into_iter().fold(f64::NEG_INFINITY, f64::max)
}

fn first_layer(m: &Metric<'_>) -> Triangle {
    let mut t = Triangle::new(m.len());
    if let Some((_, row)) = t.rows_mut().into_iter().next() {
        for (off, v) in row.iter_mut().enumerate() {
            *v = m.d(0, off + 1);
        }
    }
    t
}

/// Layer `k + 1` from layer `k`, one worker per row of fixed `b`.
fn next_layer(prev: &Triangle, k: usize, out: &mut Triangle, m: &Metric<'_>, par: Parallelism) {
    for_each_row(out.rows_mut(), par, |(b, row)| {
        let (lo, hi) = predecessor_range(k, b);
        if lo >= hi {
            row.fill(f64::NEG_INFINITY);
            return;
        }
        let w: Vec<f64> = (lo..hi).map(|a| prev.get(a, b)).collect();
        let dab: Vec<f64> = (lo..hi).map(|a| m.d(a, b)).collect();
        for (off, v) in row.iter_mut().enumerate() {
            *v = best_transition(&w, &dab, m.d(b, b + 1 + off));
        }
    });
}

/// Smallest predecessor `a` of cell `(b, c)` in layer `k + 1`.
fn predecessor(prev: &Triangle, k: usize, b: usize, c: usize, m: &Metric<'_>) -> usize {
    let (lo, hi) = predecessor_range(k, b);
    let dbc = m.d(b, c);
    let value = |a: usize| prev.get(a, b) + m.d(a, b).min(dbc);
    let best = (lo..hi).map(value).fold(f64::NEG_INFINITY, f64::max);
    (lo..hi)
        .find(|&a| value(a) == best)
        .expect("range is nonempty")
}

/// Layers `V[2..=p-1]`, kept for backtracking.
#[derive(Debug, Clone, PartialEq)]
pub struct MsmTable {
    n: usize,
    layers: Vec<Triangle>,
}

impl MsmTable {
    /// `V[k][a][b]`, for `2 <= k <= p - 1` and `a < b`; `-inf` if infeasible.
    pub fn value(&self, k: usize, a: usize, b: usize) -> f64 {
        self.layers[k - 2].get(a, b)
    }

    pub fn layer_count(&self) -> usize {
        self.layers.len()
    }

    pub fn cell_count(&self) -> usize {
        self.layers.iter().map(|t| t.cells.len()).sum()
    }

    /// Follows the recorded predecessors from cell `(a, b)` of layer `k`
    /// back to index 0, returning the `k` selected indices.
    pub fn chain(&self, k: usize, a: usize, b: usize, m: &Metric<'_>) -> Vec<usize> {
        let mut sel = vec![0; k];
        sel[k - 1] = b;
        sel[k - 2] = a;
        for kk in (3..=k).rev() {
            sel[kk - 3] = predecessor(&self.layers[kk - 3], kk - 1, sel[kk - 2], sel[kk - 1], m);
        }
        sel
    }
}

/// Builds layers `2..=p-1`.
pub fn build_table(
    front: &SortedFront,
    p: usize,
    params: DispersionParams,
    par: Parallelism,
) -> Result<MsmTable> {
    check_p(p, front.len())?;
    let m = front.metric(params);
    let n = m.len();
    let layers = par.install(move || {
        let mut layers = Vec::with_capacity(p.saturating_sub(2));
        if p > 2 {
            layers.push(first_layer(&m));
        }
        for k in 2..p - 1 {
            let mut out = Triangle::new(n);
            next_layer(layers.last().expect("layer 2 exists"), k, &mut out, &m, par);
            layers.push(out);
        }
        layers
    });
    Ok(MsmTable { n, layers })
}

/// `V[p][a][n-1]` for every `a`, from the last stored layer.
fn last_column(last: &Triangle, p: usize, m: &Metric<'_>) -> Vec<f64> {
    let n = m.len();
    let k = p - 1;
    let mut col = vec![f64::NEG_INFINITY; n];
    for (a, v) in col.iter_mut().enumerate().take(n - 1).skip(p - 2) {
        let (lo, hi) = predecessor_range(k, a);
        let dbc = m.d(a, n - 1);
        *v = (lo..hi)
            .map(|x| last.get(x, a) + m.d(x, a).min(dbc))
            .fold(f64::NEG_INFINITY, f64::max);
    }
    col
}

fn closing(col: &[f64], m: &Metric<'_>) -> (usize, f64) {
    let n = m.len();
    let mut best = (0, f64::NEG_INFINITY);
    for (a, &v) in col.iter().enumerate().take(n - 1) {
        let total = v + m.d(a, n - 1);
        if total > best.1 {
            best = (a, total);
        }
    }
    best
}

/// Exact Max-Sum-Min selection. `p <= 5` enumerates the free middle points
/// with the extremes fixed, using O(1) extra space.
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
    if p <= 5 {
        Ok((small_p(front, p, params), DpStats::default()))
    } else {
        solve_dp(front, p, params, par)
    }
}

/// Enumeration of the `p - 2` middle points between the fixed extremes.
fn small_p(front: &SortedFront, p: usize, params: DispersionParams) -> Selection {
    let m = front.metric(params);
    let n = m.len();
    let mut best_cost = f64::NEG_INFINITY;
    let mut best = [0usize; 5];
    let mut sel = [0usize; 5];
    sel[0] = 0;
    sel[p - 1] = n - 1;
    let mut consider = |s: &[usize]| {
        let c = cost_of(&m, s, Variant::MaxSumMin);
        if c > best_cost {
            best_cost = c;
            best[..s.len()].copy_from_slice(s);
        }
    };
    match p {
        2 => consider(&sel[..2]),
        3 => {
            for i in 1..n - 1 {
                sel[1] = i;
                consider(&sel[..3]);
            }
        }
        4 => {
            for i in 1..n - 1 {
                for j in i + 1..n - 1 {
                    sel[1] = i;
                    sel[2] = j;
                    consider(&sel[..4]);
                }
            }
        }
        5 => {
            for i in 1..n - 1 {
                for j in i + 1..n - 1 {
                    for l in j + 1..n - 1 {
                        sel[1] = i;
                        sel[2] = j;
                        sel[3] = l;
                        consider(&sel[..5]);
                    }
                }
            }
        }
        _ => unreachable!("small_p handles p <= 5"),
    }
    selection(best[..p].to_vec(), best_cost)
}

/// The layered DP with backtracking, for any `p >= 2`.
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
        return Ok((
            selection(vec![0, n - 1], 2.0 * m.d(0, n - 1)),
            DpStats::default(),
        ));
    }
    let table = build_table(front, p, params, par)?;
    let col = last_column(table.layers.last().expect("p > 2"), p, &m);
    let (a, opt) = closing(&col, &m);

    let mut indices = vec![0; p];
    indices[p - 1] = n - 1;
    indices[p - 2] = a;
    for k in (3..=p).rev() {
        indices[k - 3] = predecessor(
            &table.layers[k - 3],
            k - 1,
            indices[k - 2],
            indices[k - 1],
            &m,
        );
    }
    let stats = DpStats {
        peak_live_cells: table.cell_count() + col.len(),
        cell_bytes: std::mem::size_of::<f64>(),
        layers: table.layer_count() + 1,
    };
    debug_assert_eq!(table.n, n);
    Ok((selection(indices, opt), stats))
}

/// Optimal value only, keeping two layers alive.
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
        return Ok((2.0 * m.d(0, n - 1), DpStats::default()));
    }
    let value = par.install(move || {
        let mut prev = first_layer(&m);
        let mut cur = Triangle::new(n);
        for k in 2..p - 1 {
            next_layer(&prev, k, &mut cur, &m, par);
            std::mem::swap(&mut prev, &mut cur);
        }
        closing(&last_column(&prev, p, &m), &m).1
    });
    let tri = n * (n - 1) / 2;
    let stats = DpStats {
        peak_live_cells: if p > 3 { 2 * tri + n } else { tri + n },
        cell_bytes: std::mem::size_of::<f64>(),
        layers: p - 1,
    };
    Ok((value, stats))
}

fn selection(indices: Vec<usize>, cost: f64) -> Selection {
    Selection {
        variant: Variant::MaxSumMin,
        p: indices.len(),
        indices,
        cost,
        method: Method::Dp,
        secondary_cost: None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::brute_force;
    use crate::testing::{front_a, front_c, random_front};

    fn unit() -> DispersionParams {
        DispersionParams::default()
    }

    const SEQ: Parallelism = Parallelism::sequential();

    #[test]
    fn triangle_layout() {
        let mut t = Triangle::new(5);
        assert_eq!(t.cells.len(), 10);
        let mut k = 0.0;
        for (_, row) in t.rows_mut() {
            for v in row.iter_mut() {
                *v = k;
                k += 1.0;
            }
        }
        assert_eq!(t.get(0, 1), 0.0);
        assert_eq!(t.get(0, 4), 3.0);
        assert_eq!(t.get(1, 2), 4.0);
        assert_eq!(t.get(3, 4), 9.0);
    }

    #[test]
    fn examples() {
        let c = front_c();
        for s in [
            solve(&c, 3, unit(), SEQ).unwrap(),
            solve_dp(&c, 3, unit(), SEQ).unwrap().0,
        ] {
            assert_eq!(s.indices, vec![0, 2, 3]);
            assert!((s.cost - 3.0 * 13f64.sqrt()).abs() < 1e-12);
        }
        let s = solve(&c, 2, unit(), SEQ).unwrap();
        assert_eq!((s.indices, s.cost), (vec![0, 3], 2.0 * 50f64.sqrt()));

        // {0,2,3}: √18 + min(√18, √8) + √8 = 7√2; {0,1,3} gives 6√2.
        let a = front_a();
        let s = solve_dp(&a, 3, unit(), SEQ).unwrap().0;
        assert_eq!(s.indices, vec![0, 2, 3]);
        assert!((s.cost - 7.0 * 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn dp_matches_enumeration() {
        for seed in 0..30 {
            let f = random_front(seed, 11);
            for p in 2..=8 {
                let (s, _) = solve_dp(&f, p, unit(), SEQ).unwrap();
                let bf = brute_force(&f, p, Variant::MaxSumMin, unit(), false).unwrap();
                assert!(
                    (s.cost - bf.cost).abs() <= 1e-9 * bf.cost,
                    "seed {seed} p {p}"
                );
                let recomputed = cost_of(&f.metric(unit()), &s.indices, Variant::MaxSumMin);
                assert!((recomputed - s.cost).abs() <= 1e-12 * s.cost);
                let (v, _) = solve_value_only(&f, p, unit(), SEQ).unwrap();
                assert_eq!(v, s.cost);
                if p <= 5 {
                    let fast = solve(&f, p, unit(), SEQ).unwrap();
                    assert!((fast.cost - bf.cost).abs() <= 1e-9 * bf.cost);
                }
            }
        }
    }

    #[test]
    fn chains_reproduce_stored_values() {
        let f = random_front(4, 12);
        let m = f.metric(unit());
        let t = build_table(&f, 7, unit(), SEQ).unwrap();
        for k in 2..7 {
            for b in 1..12 {
                for a in 0..b {
                    let v = t.value(k, a, b);
                    if v == f64::NEG_INFINITY {
                        continue;
                    }
                    assert!(v > 0.0);
                    let chain = t.chain(k, a, b, &m);
                    assert_eq!(chain.len(), k);
                    assert_eq!(chain[0], 0);
                    let expect = v + m.d(a, b);
                    let got = cost_of(&m, &chain, Variant::MaxSumMin);
                    assert!((got - expect).abs() <= 1e-12 * expect, "k {k} a {a} b {b}");
                }
            }
        }
    }

    #[test]
    fn space_accounting() {
        let f = random_front(2, 30);
        let (_, stats) = solve_dp(&f, 7, unit(), SEQ).unwrap();
        assert_eq!(stats.peak_live_cells, 5 * 435 + 30);
        assert!(stats.peak_live_cells <= 7 * 30 * 30 / 2);
    }
}
