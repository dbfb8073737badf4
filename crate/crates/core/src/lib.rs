//! Selection of `p` maximally dispersed points from a two-dimensional Pareto
//! front.
//!
//! Points are sorted once into the front's total order; every solver then
//! works on indices into that order. Max-Min, Max-Sum-Neighbor and
//! Max-Sum-Min have exact dynamic programs; all five variants have an
//! exhaustive solver in [`oracle`].

pub mod bench;
pub mod error;
pub mod exec;
pub mod front;
pub mod instances;
pub mod maxmin;
pub mod msm;
pub mod msn;
pub mod oracle;
pub mod refine;

#[cfg(test)]
mod testing;

pub use error::{Error, Result};
pub use exec::{DpStats, Parallelism};
pub use front::{
    extreme_points, filter_dominated, sort_front, validate, DispersionParams, Point2, SortedFront,
    ValidationReport,
};
pub use maxmin::Backtrack;
pub use oracle::{brute_force, dispersion_cost, Method, Selection, Variant};
