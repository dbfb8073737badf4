//! Fixtures shared by unit tests.

use crate::front::{sort_front, Point2, SortedFront};
use crate::instances::{generate, FrontShape, ShapeTag};

/// Collinear four-point front with two Max-Min optima.
pub fn front_a() -> SortedFront {
    sort_front(&[(0.0, 10.0), (1.0, 9.0), (3.0, 7.0), (5.0, 5.0)].map(Point2::from)).unwrap()
}

pub fn front_c() -> SortedFront {
    sort_front(&[(0.0, 5.0), (1.0, 3.0), (2.0, 2.0), (5.0, 0.0)].map(Point2::from)).unwrap()
}

pub fn random_front(seed: u64, n: usize) -> SortedFront {
    generate(FrontShape::new(ShapeTag::Staircase, n, seed)).unwrap()
}
