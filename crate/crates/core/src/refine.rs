//! Refinements on top of the Max-Min optimum: a lexicographic Max-Min then
//! Max-Sum-Neighbor DP, local three-point polishing of greedy selections and
//! centroid seeding for clustering.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::{fill_row, Parallelism};
use crate::front::{DispersionParams, Metric, SortedFront};
use crate::maxmin::{self, crossing_max, Backtrack};
use crate::oracle::{check_indices, check_p, cost_of, Method, Selection, Variant, TIE_TOLERANCE};

const CHUNK: usize = 64;

/// (Max-Min value, Max-Sum-Neighbor value), compared lexicographically.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LexCost {
    pub primary: f64,
    pub secondary: f64,
}

impl LexCost {
    const INFEASIBLE: LexCost = LexCost {
        primary: f64::NEG_INFINITY,
        secondary: f64::NEG_INFINITY,
    };

    /// Primary values within [`TIE_TOLERANCE`] (relative) count as equal.
    pub fn lex_cmp(&self, other: &LexCost) -> Ordering {
        let scale = self.primary.abs().max(other.primary.abs());
        let tied = self.primary == other.primary
            || (self.primary - other.primary).abs() <= TIE_TOLERANCE * scale;
        if tied {
            self.secondary.total_cmp(&other.secondary)
        } else {
            self.primary.total_cmp(&other.primary)
        }
    }
}

/// Lexicographic DP in which primary values are capped at `cap`: every prefix
/// whose gaps all reach `cap` ties on the primary key and competes on the
/// secondary one alone.
struct LexDp<'a> {
    m: Metric<'a>,
    cap: f64,
}

impl LexDp<'_> {
    #[inline]
    fn extend(&self, from: LexCost, j: usize, i: usize) -> LexCost {
        let d = self.m.d(j, i);
        LexCost {
            primary: from.primary.min(d).min(self.cap),
            secondary: from.secondary + d,
        }
    }

    /// Best extension of `prev[lo..hi]` to `i`; smallest `j` on ties.
    fn best(&self, prev: &[LexCost], lo: usize, hi: usize, i: usize) -> (usize, LexCost) {
        let mut best = (lo, LexCost::INFEASIBLE);
        for (j, &p) in prev.iter().enumerate().take(hi).skip(lo) {
            let v = self.extend(p, j, i);
            if v.lex_cmp(&best.1) == Ordering::Greater {
                best = (j, v);
            }
        }
        best
    }
}

/// Among Max-Min optimal selections containing both extremes, one with the
/// largest Max-Sum-Neighbor value. O(pn²) time, O(pn) space.
///
/// `cost` holds the Max-Min value and `secondary_cost` the
/// Max-Sum-Neighbor value.
pub fn solve_hierarchic(
    front: &SortedFront,
    p: usize,
    params: DispersionParams,
    par: Parallelism,
) -> Result<Selection> {
    check_p(p, front.len())?;
    let m = front.metric(params);
    let n = m.len();
    let indices = if p == 2 {
        vec![0, n - 1]
    } else {
        let (opt, _) = maxmin::optimal_value(front, p, params, par)?;
        let dp = LexDp {
            m,
            cap: opt - TIE_TOLERANCE * opt,
        };
        let rows = par.install(|| {
            let mut first = vec![LexCost::INFEASIBLE; n];
            for (i, c) in first.iter_mut().enumerate().skip(1) {
                *c = dp.extend(
                    LexCost {
                        primary: f64::INFINITY,
                        secondary: 0.0,
                    },
                    0,
                    i,
                );
            }
            let mut rows = vec![first];
            for k in 3..p {
                let prev = rows.last().expect("row 2 exists");
                let mut out = vec![LexCost::INFEASIBLE; n];
                fill_row(&mut out[k - 1..], k - 1, CHUNK, par, |i| {
                    dp.best(prev, k - 2, i, i).1
                });
                rows.push(out);
            }
            rows
        });
        let mut indices = vec![0; p];
        indices[p - 1] = n - 1;
        let mut i = n - 1;
        for k in (3..=p).rev() {
            let j = dp.best(&rows[k - 3], k - 2, i, i).0;
            indices[k - 2] = j;
            i = j;
        }
        indices
    };
    let mut sel = Selection::evaluate(front, indices, Variant::MaxMin, params, Method::Hierarchic)?;
    sel.secondary_cost = Some(cost_of(&m, &sel.indices, Variant::MaxSumNeighbor));
    Ok(sel)
}

/// Result of [`polish`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolishOutcome {
    pub indices: Vec<usize>,
    pub maxmin_before: f64,
    pub maxmin_after: f64,
    pub msn_before: f64,
    pub msn_after: f64,
    /// Full sweeps performed, including the final one without changes.
    pub sweeps: usize,
}

/// Local search: each interior point is moved to the position between its
/// selected neighbors that maximizes its smaller gap, found by bisection.
/// Moves are taken only on strict improvement; stops after a sweep with no
/// move.
pub fn polish(
    front: &SortedFront,
    indices: &[usize],
    params: DispersionParams,
) -> Result<PolishOutcome> {
    let n = front.len();
    check_indices(indices, n)?;
    if indices[0] != 0 || indices[indices.len() - 1] != n - 1 {
        return Err(Error::MalformedSelection(
            "polishing needs a selection anchored at both extremes".into(),
        ));
    }
    let m = front.metric(params);
    let mut sel = indices.to_vec();
    let maxmin_before = cost_of(&m, &sel, Variant::MaxMin);
    let msn_before = cost_of(&m, &sel, Variant::MaxSumNeighbor);
    let mut sweeps = 0;
    loop {
        sweeps += 1;
        let mut moved = false;
        for t in 1..sel.len() - 1 {
            let (a, b, c) = (sel[t - 1], sel[t], sel[t + 1]);
            let incumbent = m.d(a, b).min(m.d(b, c));
            let (j, v) = crossing_max(a + 1, c - 1, |j| m.d(a, j), |j| m.d(j, c));
            if v > incumbent {
                sel[t] = j;
                moved = true;
            }
        }
        if !moved {
            break;
        }
    }
    Ok(PolishOutcome {
        maxmin_after: cost_of(&m, &sel, Variant::MaxMin),
        msn_after: cost_of(&m, &sel, Variant::MaxSumNeighbor),
        indices: sel,
        maxmin_before,
        msn_before,
        sweeps,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SeedStrategy {
    /// The `k` points of an optimal Max-Min `k`-selection.
    Direct,
    /// Every other interior point of an optimal Max-Min `(2k+1)`-selection.
    Intermediate,
}

/// Initial centroid indices for a `k`-clustering of the front.
pub fn seed_centroids(
    front: &SortedFront,
    k: usize,
    strategy: SeedStrategy,
    params: DispersionParams,
    par: Parallelism,
) -> Result<Vec<usize>> {
    let n = front.len();
    match strategy {
        SeedStrategy::Direct => {
            Ok(maxmin::solve(front, k, params, Backtrack::MinIndexes, par)?.indices)
        }
        SeedStrategy::Intermediate => {
            let p = 2 * k + 1;
            if k == 0 || p > n {
                return Err(Error::InvalidP { p, n, min: 3 });
            }
            let sel = maxmin::solve(front, p, params, Backtrack::MinIndexes, par)?;
            Ok(sel
                .indices
                .iter()
                .skip(1)
                .step_by(2)
                .take(k)
                .copied()
                .collect())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::lex_brute_force;
    use crate::testing::{front_a, front_c, random_front};

    fn unit() -> DispersionParams {
        DispersionParams::default()
    }

    const SEQ: Parallelism = Parallelism::sequential();

    #[test]
    fn hierarchic_examples() {
        let a = front_a();
        let s = solve_hierarchic(&a, 3, unit(), SEQ).unwrap();
        assert_eq!(s.indices, vec![0, 2, 3]);
        assert_eq!(s.cost, 8f64.sqrt());
        assert!((s.secondary_cost.unwrap() - 50f64.sqrt()).abs() < 1e-12);
        assert_eq!(s.method, Method::Hierarchic);

        let c = front_c();
        assert_eq!(
            solve_hierarchic(&c, 2, unit(), SEQ).unwrap().indices,
            vec![0, 3]
        );
    }

    #[test]
    fn hierarchic_matches_anchored_enumeration() {
        for seed in 0..40 {
            let f = random_front(seed, 10);
            for p in 2..=5 {
                let h = solve_hierarchic(&f, p, unit(), SEQ).unwrap();
                let dp = maxmin::solve(&f, p, unit(), Backtrack::MinIndexes, SEQ).unwrap();
                assert!(h.cost >= dp.cost - 1e-12 * dp.cost && h.cost <= dp.cost);
                let lex = lex_brute_force(&f, p, unit(), true).unwrap();
                let (hs, ls) = (h.secondary_cost.unwrap(), lex.secondary_cost.unwrap());
                assert!(
                    (hs - ls).abs() <= 1e-9 * ls,
                    "seed {seed} p {p}: {hs} vs {ls}"
                );
            }
        }
    }

    #[test]
    fn lex_cost_order() {
        let a = LexCost {
            primary: 1.0,
            secondary: 5.0,
        };
        let b = LexCost {
            primary: 1.0 + 1e-15,
            secondary: 4.0,
        };
        let c = LexCost {
            primary: 2.0,
            secondary: 0.0,
        };
        assert_eq!(a.lex_cmp(&b), Ordering::Greater);
        assert_eq!(c.lex_cmp(&a), Ordering::Greater);
        assert_eq!(a.lex_cmp(&a), Ordering::Equal);
    }

    #[test]
    fn polish_examples() {
        let c = front_c();
        let out = polish(&c, &[0, 1, 3], unit()).unwrap();
        assert_eq!(out.indices, vec![0, 2, 3]);
        assert_eq!(out.maxmin_before, 5f64.sqrt());
        assert_eq!(out.maxmin_after, 13f64.sqrt());

        let again = polish(&c, &out.indices, unit()).unwrap();
        assert_eq!(again.indices, out.indices);
        assert_eq!(again.sweeps, 1);

        assert!(polish(&c, &[1, 2, 3], unit()).is_err());
        assert!(polish(&c, &[0, 2, 1], unit()).is_err());
    }

    #[test]
    fn polish_never_loses_and_is_idempotent() {
        for seed in 0..30 {
            let f = random_front(seed, 80);
            let dp = maxmin::solve(&f, 7, unit(), Backtrack::MinIndexes, SEQ).unwrap();
            let out = polish(&f, &dp.indices, unit()).unwrap();
            assert!(out.maxmin_after >= out.maxmin_before);
            assert_eq!(out.maxmin_after, dp.cost);
            let again = polish(&f, &out.indices, unit()).unwrap();
            assert_eq!(again.indices, out.indices);
        }
    }

    #[test]
    fn seeding() {
        let c = front_c();
        assert_eq!(
            seed_centroids(&c, 2, SeedStrategy::Direct, unit(), SEQ).unwrap(),
            vec![0, 3]
        );
        assert_eq!(
            seed_centroids(&c, 1, SeedStrategy::Intermediate, unit(), SEQ).unwrap(),
            vec![2]
        );
        assert!(seed_centroids(&c, 2, SeedStrategy::Intermediate, unit(), SEQ).is_err());
        assert!(seed_centroids(&c, 0, SeedStrategy::Intermediate, unit(), SEQ).is_err());
        assert!(seed_centroids(&c, 5, SeedStrategy::Direct, unit(), SEQ).is_err());

        let f = random_front(9, 50);
        let seeds = seed_centroids(&f, 4, SeedStrategy::Intermediate, unit(), SEQ).unwrap();
        assert_eq!(seeds.len(), 4);
        assert!(seeds.windows(2).all(|w| w[0] < w[1]));
        assert!(seeds.iter().all(|&s| s > 0 && s < 49));
    }
}
