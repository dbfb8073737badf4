//! Dispersion objectives for all five variants and exhaustive solvers used as
//! ground truth for the dynamic programs.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::front::{DispersionParams, Metric, SortedFront};

/// Largest number of selections an exhaustive search may visit.
pub const ENUMERATION_BUDGET: u128 = 100_000_000;

/// Relative tolerance deciding that two Max-Min values tie.
pub const TIE_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Variant {
    /// Minimum distance between selected points.
    MaxMin,
    /// Sum of all pairwise distances.
    MaxSum,
    /// Sum over points of the distance to the nearest selected point.
    MaxSumMin,
    /// Minimum over points of the summed distance to the other points.
    MaxMinSum,
    /// Sum of distances between consecutive selected points.
    MaxSumNeighbor,
}

impl Variant {
    pub const ALL: [Variant; 5] = [
        Variant::MaxMin,
        Variant::MaxSumNeighbor,
        Variant::MaxSumMin,
        Variant::MaxSum,
        Variant::MaxMinSum,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Variant::MaxMin => "max-min",
            Variant::MaxSum => "max-sum",
            Variant::MaxSumMin => "max-sum-min",
            Variant::MaxMinSum => "max-min-sum",
            Variant::MaxSumNeighbor => "max-sum-neighbor",
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Variant {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Variant::ALL
            .into_iter()
            .find(|v| v.name() == s)
            .ok_or_else(|| format!("unknown variant `{s}`"))
    }
}

/// How a selection was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    BruteForce,
    Dp,
    Greedy,
    Hierarchic,
    Polished,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::BruteForce => "brute-force",
            Method::Dp => "dp",
            Method::Greedy => "greedy",
            Method::Hierarchic => "hierarchic",
            Method::Polished => "polished",
        })
    }
}

/// A solved instance: `p` strictly increasing indices into a [`SortedFront`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Selection {
    pub variant: Variant,
    pub p: usize,
    pub indices: Vec<usize>,
    pub cost: f64,
    pub method: Method,
    /// Max-Sum-Neighbor value for hierarchic selections.
    pub secondary_cost: Option<f64>,
}

impl Selection {
    /// Builds a selection and evaluates its cost.
    pub fn evaluate(
        front: &SortedFront,
        indices: Vec<usize>,
        variant: Variant,
        params: DispersionParams,
        method: Method,
    ) -> Result<Self> {
        let cost = dispersion_cost(front, &indices, variant, params)?;
        Ok(Self {
            variant,
            p: indices.len(),
            indices,
            cost,
            method,
            secondary_cost: None,
        })
    }
}

pub(crate) fn check_p(p: usize, n: usize) -> Result<()> {
    if p < 2 || p > n {
        Err(Error::InvalidP { p, n, min: 2 })
    } else {
        Ok(())
    }
}

pub(crate) fn check_indices(indices: &[usize], n: usize) -> Result<()> {
    if indices.len() < 2 {
        return Err(Error::MalformedSelection(format!(
            "need at least 2 indices, got {}",
            indices.len()
        )));
    }
    if let Some(&index) = indices.iter().find(|&&k| k >= n) {
        return Err(Error::IndexOutOfRange { index, n });
    }
    if indices.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::MalformedSelection(
            "indices must be strictly increasing".into(),
        ));
    }
    Ok(())
}

/// Dispersion value of a selection under `variant`.
///
/// Max-Min and Max-Sum-Min use only consecutive selected pairs, which is
/// exact on a sorted front because distances grow with index separation.
pub fn dispersion_cost(
    front: &SortedFront,
    indices: &[usize],
    variant: Variant,
    params: DispersionParams,
) -> Result<f64> {
    check_indices(indices, front.len())?;
    Ok(cost_of(&front.metric(params), indices, variant))
}

pub(crate) fn cost_of(m: &Metric<'_>, s: &[usize], variant: Variant) -> f64 {
    let gaps = || s.windows(2).map(|w| m.d(w[0], w[1]));
    match variant {
        Variant::MaxMin => gaps().fold(f64::INFINITY, f64::min),
        Variant::MaxSumNeighbor => gaps().sum(),
        Variant::MaxSumMin => {
            let p = s.len();
            (0..p)
                .map(|j| {
                    let left = (j > 0).then(|| m.d(s[j - 1], s[j]));
                    let right = (j + 1 < p).then(|| m.d(s[j], s[j + 1]));
                    match (left, right) {
                        (Some(l), Some(r)) => l.min(r),
                        (Some(v), None) | (None, Some(v)) => v,
                        (None, None) => unreachable!("selection has at least 2 points"),
                    }
                })
                .sum()
        }
        Variant::MaxSum => {
            let mut total = 0.0;
            for (k, &a) in s.iter().enumerate() {
                for &b in &s[k + 1..] {
                    total += m.d(a, b);
                }
            }
            total
        }
        Variant::MaxMinSum => s
            .iter()
            .map(|&a| {
                s.iter()
                    .filter(|&&b| b != a)
                    .map(|&b| m.d(a, b))
                    .sum::<f64>()
            })
            .fold(f64::INFINITY, f64::min),
    }
}

/// Dispersion value from the all-pairs definitions, without relying on the
/// ordering of the front. Agrees with [`dispersion_cost`] on valid fronts.
pub fn dispersion_cost_all_pairs(
    front: &SortedFront,
    indices: &[usize],
    variant: Variant,
    params: DispersionParams,
) -> Result<f64> {
    check_indices(indices, front.len())?;
    let m = front.metric(params);
    let nearest = |a: usize| {
        indices
            .iter()
            .filter(|&&b| b != a)
            .map(|&b| m.d(a, b))
            .fold(f64::INFINITY, f64::min)
    };
    Ok(match variant {
        Variant::MaxMin => indices
            .iter()
            .map(|&a| nearest(a))
            .fold(f64::INFINITY, f64::min),
        Variant::MaxSumMin => indices.iter().map(|&a| nearest(a)).sum(),
        Variant::MaxSumNeighbor => {
            // Neighbors in the front order, whatever order the caller used.
            let mut sorted = indices.to_vec();
            sorted.sort_unstable();
            cost_of(&m, &sorted, variant)
        }
        Variant::MaxSum | Variant::MaxMinSum => cost_of(&m, indices, variant),
    })
}

fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.saturating_mul((n - i) as u128) / (i as u128 + 1);
    }
    acc
}

/// Number of selections visited by an exhaustive search.
pub fn enumeration_size(n: usize, p: usize, fix_extremes: bool) -> u128 {
    if fix_extremes {
        binomial(n.saturating_sub(2), p.saturating_sub(2))
    } else {
        binomial(n, p)
    }
}

/// Visits every strictly increasing `p`-subset of `0..n` in lexicographic
/// order; with `fix_extremes`, only those containing `0` and `n - 1`.
fn for_each_selection(n: usize, p: usize, fix_extremes: bool, mut visit: impl FnMut(&[usize])) {
    let (lo, hi, free) = if fix_extremes {
        (1, n - 1, p - 2)
    } else {
        (0, n, p)
    };
    let mut sel = vec![0usize; p];
    let offset = usize::from(fix_extremes);
    if fix_extremes {
        sel[0] = 0;
        sel[p - 1] = n - 1;
    }
    let mut comb: Vec<usize> = (lo..lo + free).collect();
    loop {
        sel[offset..offset + free].copy_from_slice(&comb);
        visit(&sel);
        // Advance to the next combination of `free` values in lo..hi.
        let mut k = free;
        loop {
            if k == 0 {
                return;
            }
            k -= 1;
            if comb[k] < hi - (free - k) {
                comb[k] += 1;
                for t in k + 1..free {
                    comb[t] = comb[t - 1] + 1;
                }
                break;
            }
        }
    }
}

fn guard(n: usize, p: usize, fix_extremes: bool) -> Result<()> {
    check_p(p, n)?;
    let combinations = enumeration_size(n, p, fix_extremes);
    if combinations > ENUMERATION_BUDGET {
        return Err(Error::BudgetExceeded {
            combinations,
            limit: ENUMERATION_BUDGET,
        });
    }
    Ok(())
}

/// Exact solver by enumeration. Ties go to the lexicographically smallest
/// index sequence.
pub fn brute_force(
    front: &SortedFront,
    p: usize,
    variant: Variant,
    params: DispersionParams,
    fix_extremes: bool,
) -> Result<Selection> {
    guard(front.len(), p, fix_extremes)?;
    let m = front.metric(params);
    let mut best = f64::NEG_INFINITY;
    let mut best_sel = Vec::new();
    for_each_selection(front.len(), p, fix_extremes, |s| {
        let c = cost_of(&m, s, variant);
        if c > best {
            best = c;
            best_sel.clear();
            best_sel.extend_from_slice(s);
        }
    });
    Ok(Selection {
        variant,
        p,
        indices: best_sel,
        cost: best,
        method: Method::BruteForce,
        secondary_cost: None,
    })
}

/// The optimal value and every selection whose cost is within `rel_tol` of it,
/// in lexicographic order.
pub fn optimal_selections(
    front: &SortedFront,
    p: usize,
    variant: Variant,
    params: DispersionParams,
    fix_extremes: bool,
    rel_tol: f64,
) -> Result<(f64, Vec<Vec<usize>>)> {
    let best = brute_force(front, p, variant, params, fix_extremes)?.cost;
    let m = front.metric(params);
    let floor = best - rel_tol * best.abs();
    let mut all = Vec::new();
    for_each_selection(front.len(), p, fix_extremes, |s| {
        if cost_of(&m, s, variant) >= floor {
            all.push(s.to_vec());
        }
    });
    Ok((best, all))
}

/// Lexicographic optimum: best Max-Min value first (ties within
/// [`TIE_TOLERANCE`]), then best Max-Sum-Neighbor value.
pub fn lex_brute_force(
    front: &SortedFront,
    p: usize,
    params: DispersionParams,
    fix_extremes: bool,
) -> Result<Selection> {
    let (best_mm, ties) = optimal_selections(
        front,
        p,
        Variant::MaxMin,
        params,
        fix_extremes,
        TIE_TOLERANCE,
    )?;
    let m = front.metric(params);
    let mut best: Option<(f64, &Vec<usize>)> = None;
    for s in &ties {
        let msn = cost_of(&m, s, Variant::MaxSumNeighbor);
        if best.is_none_or(|(v, _)| msn > v) {
            best = Some((msn, s));
        }
    }
    let (msn, indices) = best.expect("at least one selection attains the optimum");
    let cost = cost_of(&m, indices, Variant::MaxMin);
    debug_assert!(cost >= best_mm - TIE_TOLERANCE * best_mm);
    Ok(Selection {
        variant: Variant::MaxMin,
        p,
        indices: indices.clone(),
        cost,
        method: Method::BruteForce,
        secondary_cost: Some(msn),
    })
}
