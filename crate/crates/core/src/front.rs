//! Front data model: points in objective space, validation of mutual
//! incomparability, the sorted front and the distance function.
//!
//! Both objectives are minimized. A valid two-dimensional front sorted by the
//! first objective has strictly increasing `x` and strictly decreasing `y`, so
//! for `i < j` we always have `points[i] ≺ points[j]`.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One element of a front: two minimized objective values.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    /// `self ≺ other`: strictly smaller first objective and strictly larger
    /// second objective.
    pub fn precedes(&self, other: &Point2) -> bool {
        self.x < other.x && self.y > other.y
    }

    /// `self ≼ other`.
    pub fn weakly_precedes(&self, other: &Point2) -> bool {
        self.precedes(other) || self == other
    }

    /// Mutual incomparability: one of the two strictly precedes the other.
    pub fn incomparable(&self, other: &Point2) -> bool {
        self.precedes(other) || other.precedes(self)
    }

    /// Pareto dominance for two minimized objectives.
    pub fn dominates(&self, other: &Point2) -> bool {
        self.x <= other.x && self.y <= other.y && self != other
    }

    #[inline]
    fn sq_dist(&self, other: &Point2) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        dx * dx + dy * dy
    }

    fn lex_cmp(&self, other: &Point2) -> Ordering {
        self.x
            .total_cmp(&other.x)
            .then_with(|| self.y.total_cmp(&other.y))
    }
}

impl From<(f64, f64)> for Point2 {
    fn from((x, y): (f64, f64)) -> Self {
        Self { x, y }
    }
}

impl From<[f64; 2]> for Point2 {
    fn from([x, y]: [f64; 2]) -> Self {
        Self { x, y }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ViolationReason {
    Duplicate,
    Dominates,
    TieOnAxis,
}

impl fmt::Display for ViolationReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ViolationReason::Duplicate => "duplicate",
            ViolationReason::Dominates => "dominates",
            ViolationReason::TieOnAxis => "tie-on-axis",
        })
    }
}

/// A comparable pair, given by positions in the caller's input. For
/// `Dominates`, `first` is the dominating point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub first: usize,
    pub second: usize,
    pub reason: ViolationReason,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub ok: bool,
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    fn from_violations(violations: Vec<Violation>) -> Self {
        Self {
            ok: violations.is_empty(),
            violations,
        }
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.ok {
            return f.write_str("ok");
        }
        for (k, v) in self.violations.iter().enumerate() {
            if k > 0 {
                f.write_str("; ")?;
            }
            write!(f, "points {} and {}: {}", v.first, v.second, v.reason)?;
        }
        Ok(())
    }
}

/// Exponent applied to the Euclidean distance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DispersionParams {
    alpha: f64,
}

impl DispersionParams {
    pub fn new(alpha: f64) -> Result<Self> {
        if alpha.is_finite() && alpha > 0.0 {
            Ok(Self { alpha })
        } else {
            Err(Error::InvalidAlpha(alpha))
        }
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Maps a squared Euclidean distance to `d^alpha`.
    #[inline]
    pub fn from_squared(&self, sq: f64) -> f64 {
        if self.alpha == 1.0 {
            sq.sqrt()
        } else if self.alpha == 2.0 {
            sq
        } else {
            sq.sqrt().powf(self.alpha)
        }
    }
}

impl Default for DispersionParams {
    fn default() -> Self {
        Self { alpha: 1.0 }
    }
}

/// A validated front indexed by the total order `x_0 ≺ x_1 ≺ … ≺ x_{n-1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct SortedFront {
    points: Vec<Point2>,
    /// `original[k]` is the input position of the point at sorted position k.
    original: Vec<usize>,
}

impl SortedFront {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Point2] {
        &self.points
    }

    pub fn point(&self, i: usize) -> Point2 {
        self.points[i]
    }

    /// Sorted position → input position.
    pub fn original_indices(&self) -> &[usize] {
        &self.original
    }

    /// Input position → sorted position; `None` for inputs dropped by
    /// [`filter_dominated`].
    pub fn sorted_positions(&self, input_len: usize) -> Vec<Option<usize>> {
        let mut pos = vec![None; input_len];
        for (sorted, &orig) in self.original.iter().enumerate() {
            if orig < input_len {
                pos[orig] = Some(sorted);
            }
        }
        pos
    }

    /// `d(x_i, x_j)^alpha`, with range checking.
    pub fn dist(&self, i: usize, j: usize, params: DispersionParams) -> Result<f64> {
        let n = self.len();
        for index in [i, j] {
            if index >= n {
                return Err(Error::IndexOutOfRange { index, n });
            }
        }
        Ok(self.metric(params).d(i, j))
    }

    pub fn metric(&self, params: DispersionParams) -> Metric<'_> {
        Metric {
            points: &self.points,
            params,
        }
    }
}

/// Unchecked distance evaluation used inside the solvers.
#[derive(Debug, Clone, Copy)]
pub struct Metric<'a> {
    points: &'a [Point2],
    params: DispersionParams,
}

impl Metric<'_> {
    #[inline]
    pub fn d(&self, i: usize, j: usize) -> f64 {
        self.params
            .from_squared(self.points[i].sq_dist(&self.points[j]))
    }

    /// Squared Euclidean distance. `d` is a nondecreasing function of it, so
    /// max/min comparisons may be made on this value instead.
    #[inline]
    pub fn sq(&self, i: usize, j: usize) -> f64 {
        self.points[i].sq_dist(&self.points[j])
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn params(&self) -> DispersionParams {
        self.params
    }
}

fn check_finite(points: &[Point2]) -> Result<()> {
    if points.is_empty() {
        return Err(Error::EmptyFront);
    }
    match points.iter().position(|p| !p.is_finite()) {
        Some(index) => Err(Error::NonFinite { index }),
        None => Ok(()),
    }
}

fn lex_order(points: &[Point2]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..points.len()).collect();
    order.sort_by(|&a, &b| points[a].lex_cmp(&points[b]).then(a.cmp(&b)));
    order
}

fn adjacent_violations(points: &[Point2], order: &[usize]) -> Vec<Violation> {
    order
        .windows(2)
        .filter_map(|w| {
            let (a, b) = (points[w[0]], points[w[1]]);
            let reason = if a == b {
                ViolationReason::Duplicate
            } else if a.x == b.x || a.y == b.y {
                ViolationReason::TieOnAxis
            } else if a.y < b.y {
                ViolationReason::Dominates
            } else {
                return None;
            };
            Some(Violation {
                first: w[0],
                second: w[1],
                reason,
            })
        })
        .collect()
}

/// Checks that every pair of points is mutually incomparable.
///
/// Only pairs adjacent in `(x, y)` order are reported; the set is empty
/// exactly when the whole input is a valid front.
pub fn validate(points: &[Point2]) -> Result<ValidationReport> {
    check_finite(points)?;
    let order = lex_order(points);
    Ok(ValidationReport::from_violations(adjacent_violations(
        points, &order,
    )))
}

/// Sorts a valid front into its total order, in O(n log n).
pub fn sort_front(points: &[Point2]) -> Result<SortedFront> {
    check_finite(points)?;
    let order = lex_order(points);
    let violations = adjacent_violations(points, &order);
    if !violations.is_empty() {
        return Err(Error::Validation(ValidationReport::from_violations(
            violations,
        )));
    }
    Ok(SortedFront {
        points: order.iter().map(|&k| points[k]).collect(),
        original: order,
    })
}

/// Keeps the non-dominated subset of `points`. Among duplicates and weakly
/// dominated points the lexicographically smallest survives.
pub fn filter_dominated(points: &[Point2]) -> Result<SortedFront> {
    check_finite(points)?;
    let order = lex_order(points);
    let mut kept: Vec<usize> = Vec::with_capacity(points.len());
    for k in order {
        match kept.last() {
            Some(&last) if points[k].y >= points[last].y => {}
            _ => kept.push(k),
        }
    }
    if kept.is_empty() {
        return Err(Error::EmptyFront);
    }
    Ok(SortedFront {
        points: kept.iter().map(|&k| points[k]).collect(),
        original: kept,
    })
}

/// Positions of the minimal-x and maximal-x points in one pass, without
/// sorting. On a valid front these are the two extremes of the order.
pub fn extreme_points(points: &[Point2]) -> Result<(usize, usize)> {
    if points.is_empty() {
        return Err(Error::EmptyFront);
    }
    let mut lo = 0;
    let mut hi = 0;
    for (k, p) in points.iter().enumerate().skip(1) {
        if p.x < points[lo].x {
            lo = k;
        }
        if p.x > points[hi].x {
            hi = k;
        }
    }
    Ok((lo, hi))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pts(raw: &[(f64, f64)]) -> Vec<Point2> {
        raw.iter().copied().map(Point2::from).collect()
    }

    #[test]
    fn sorts_a_permuted_front() {
        let input = pts(&[(5.0, 5.0), (0.0, 10.0), (3.0, 7.0), (1.0, 9.0)]);
        let front = sort_front(&input).unwrap();
        assert_eq!(
            front.points(),
            pts(&[(0.0, 10.0), (1.0, 9.0), (3.0, 7.0), (5.0, 5.0)]).as_slice()
        );
        assert_eq!(front.original_indices(), &[1, 3, 2, 0]);
        assert_eq!(
            front.sorted_positions(4),
            vec![Some(3), Some(0), Some(2), Some(1)]
        );
    }

    #[test]
    fn singleton_front() {
        let front = sort_front(&pts(&[(2.0, 2.0)])).unwrap();
        assert_eq!(front.len(), 1);
        assert_eq!(front.point(0), Point2::new(2.0, 2.0));
    }

    #[test]
    fn rejects_dominated_point() {
        let input = pts(&[(0.0, 1.0), (1.0, 0.0), (2.0, 0.5)]);
        match sort_front(&input) {
            Err(Error::Validation(report)) => {
                assert!(!report.ok);
                assert_eq!(
                    report.violations,
                    vec![Violation {
                        first: 1,
                        second: 2,
                        reason: ViolationReason::Dominates
                    }]
                );
            }
            other => panic!("expected validation error, got {other:?}"),
        }
    }

    #[test]
    fn rejects_ties_and_duplicates() {
        let report = validate(&pts(&[(0.0, 1.0), (0.0, 2.0), (3.0, 0.0), (3.0, 0.0)])).unwrap();
        let reasons: Vec<_> = report.violations.iter().map(|v| v.reason).collect();
        assert_eq!(
            reasons,
            vec![ViolationReason::TieOnAxis, ViolationReason::Duplicate]
        );
        let report = validate(&pts(&[(0.0, 1.0), (1.0, 1.0)])).unwrap();
        assert_eq!(report.violations[0].reason, ViolationReason::TieOnAxis);
    }

    #[test]
    fn rejects_non_finite_and_empty() {
        assert!(matches!(
            sort_front(&pts(&[(0.0, 1.0), (f64::NAN, 0.0)])),
            Err(Error::NonFinite { index: 1 })
        ));
        assert!(matches!(sort_front(&[]), Err(Error::EmptyFront)));
        assert!(matches!(filter_dominated(&[]), Err(Error::EmptyFront)));
    }

    #[test]
    fn filter_drops_dominated_and_duplicates() {
        let front = filter_dominated(&pts(&[(0.0, 1.0), (1.0, 0.0), (2.0, 0.5)])).unwrap();
        assert_eq!(front.points(), pts(&[(0.0, 1.0), (1.0, 0.0)]).as_slice());

        let valid = pts(&[(0.0, 10.0), (1.0, 9.0), (3.0, 7.0), (5.0, 5.0)]);
        assert_eq!(filter_dominated(&valid).unwrap().points(), valid.as_slice());

        let front = filter_dominated(&pts(&[(1.0, 1.0), (1.0, 1.0)])).unwrap();
        assert_eq!(front.points(), pts(&[(1.0, 1.0)]).as_slice());
        assert_eq!(front.original_indices(), &[0]);
    }

    #[test]
    fn filter_keeps_lexicographically_smallest_on_axis_ties() {
        let front =
            filter_dominated(&pts(&[(1.0, 3.0), (1.0, 2.0), (2.0, 2.0), (3.0, 0.0)])).unwrap();
        assert_eq!(front.points(), pts(&[(1.0, 2.0), (3.0, 0.0)]).as_slice());
    }

    #[test]
    fn distance_with_exponents() {
        let front = sort_front(&pts(&[(0.0, 4.0), (3.0, 0.0)])).unwrap();
        let one = DispersionParams::new(1.0).unwrap();
        let two = DispersionParams::new(2.0).unwrap();
        let half = DispersionParams::new(0.5).unwrap();
        assert_eq!(front.dist(0, 1, one).unwrap(), 5.0);
        assert_eq!(front.dist(1, 0, two).unwrap(), 25.0);
        assert!((front.dist(0, 1, half).unwrap() - 5f64.sqrt()).abs() < 1e-15);
        assert_eq!(front.dist(1, 1, one).unwrap(), 0.0);
        assert!(matches!(
            front.dist(0, 2, one),
            Err(Error::IndexOutOfRange { index: 2, n: 2 })
        ));
    }

    #[test]
    fn alpha_must_be_positive() {
        assert!(DispersionParams::new(0.0).is_err());
        assert!(DispersionParams::new(-1.0).is_err());
        assert!(DispersionParams::new(f64::NAN).is_err());
    }

    #[test]
    fn extremes_without_sorting() {
        let raw = pts(&[(3.0, 7.0), (0.0, 10.0), (5.0, 5.0), (1.0, 9.0)]);
        assert_eq!(extreme_points(&raw).unwrap(), (1, 2));
        let sorted = sort_front(&raw).unwrap();
        assert_eq!(extreme_points(sorted.points()).unwrap(), (0, 3));
        assert_eq!(extreme_points(&pts(&[(2.0, 2.0)])).unwrap(), (0, 0));
        assert!(extreme_points(&[]).is_err());
    }

    #[test]
    fn order_relations() {
        let a = Point2::new(0.0, 10.0);
        let b = Point2::new(1.0, 9.0);
        assert!(a.precedes(&b));
        assert!(!b.precedes(&a));
        assert!(a.weakly_precedes(&a));
        assert!(a.incomparable(&b));
        assert!(!a.dominates(&b));
        assert!(Point2::new(0.0, 0.0).dominates(&Point2::new(0.0, 1.0)));
    }
}
