//! Empirical scaling runs for the dynamic programs: median wall time per size
//! and a least-squares fit of `log(time)` against `log(n)`.

use std::fmt;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::{DpStats, Parallelism};
use crate::front::{DispersionParams, SortedFront};
use crate::instances::{generate, FrontShape, ShapeTag};
use crate::maxmin::{self, Backtrack};
use crate::oracle::Variant;
use crate::{msm, msn};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchConfig {
    /// One of the variants with a dynamic program.
    pub variant: Variant,
    /// Strictly increasing front sizes.
    pub sizes: Vec<usize>,
    pub p: usize,
    pub shape: ShapeTag,
    pub seed: u64,
    /// At least 3.
    pub repeats: usize,
    pub alpha: f64,
    pub parallelism: Parallelism,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchPoint {
    pub n: usize,
    pub median_ms: f64,
    pub peak_live_cells: usize,
    pub peak_bytes: usize,
    pub cost: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub variant: Variant,
    pub p: usize,
    pub shape: ShapeTag,
    pub repeats: usize,
    pub threads: usize,
    pub points: Vec<BenchPoint>,
    /// Fitted exponent of `time ~ n^slope`; `None` with fewer than two sizes.
    pub slope: Option<f64>,
}

/// Least-squares slope of `ys` against `xs`, both on a log scale.
pub fn log_log_slope(xs: &[f64], ys: &[f64]) -> Option<f64> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return None;
    }
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let k = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / k;
    let my = ly.iter().sum::<f64>() / k;
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx) * (x - mx)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

pub fn median(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    let k = values.len();
    if k % 2 == 1 {
        values[k / 2]
    } else {
        0.5 * (values[k / 2 - 1] + values[k / 2])
    }
}

/// One timed solve; returns (milliseconds, cost, stats).
pub fn time_solve(
    front: &SortedFront,
    variant: Variant,
    p: usize,
    params: DispersionParams,
    par: Parallelism,
) -> Result<(f64, f64, DpStats)> {
    let start = Instant::now();
    let (sel, stats) = match variant {
        Variant::MaxMin => maxmin::solve_with_stats(front, p, params, Backtrack::MinIndexes, par)?,
        Variant::MaxSumNeighbor => msn::solve_with_stats(front, p, params, par)?,
        Variant::MaxSumMin => msm::solve_with_stats(front, p, params, par)?,
        v => {
            return Err(Error::InvalidConfig(format!(
                "`{v}` has no dynamic program to benchmark"
            )))
        }
    };
    Ok((start.elapsed().as_secs_f64() * 1e3, sel.cost, stats))
}

pub fn run(config: &BenchConfig) -> Result<BenchReport> {
    if config.repeats < 3 {
        return Err(Error::InvalidConfig("repeats must be at least 3".into()));
    }
    if config.sizes.is_empty() || config.sizes.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidConfig(
            "sizes must be nonempty and strictly increasing".into(),
        ));
    }
    let params = DispersionParams::new(config.alpha)?;
    let mut points = Vec::with_capacity(config.sizes.len());
    for &n in &config.sizes {
        let front = generate(FrontShape::new(config.shape, n, config.seed))?;
        // Untimed warm-up: first-touch page faults and cold caches.
        time_solve(&front, config.variant, config.p, params, config.parallelism)?;
        let mut times = Vec::with_capacity(config.repeats);
        let mut last = (0.0, DpStats::default());
        for _ in 0..config.repeats {
            let (ms, cost, stats) =
                time_solve(&front, config.variant, config.p, params, config.parallelism)?;
            times.push(ms);
            last = (cost, stats);
        }
        points.push(BenchPoint {
            n,
            median_ms: median(&mut times),
            peak_live_cells: last.1.peak_live_cells,
            peak_bytes: last.1.peak_bytes(),
            cost: last.0,
        });
    }
    let xs: Vec<f64> = points.iter().map(|b| b.n as f64).collect();
    let ys: Vec<f64> = points.iter().map(|b| b.median_ms.max(1e-6)).collect();
    Ok(BenchReport {
        variant: config.variant,
        p: config.p,
        shape: config.shape,
        repeats: config.repeats,
        threads: config.parallelism.thread_count(),
        slope: log_log_slope(&xs, &ys),
        points,
    })
}

impl fmt::Display for BenchReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "{} p={} shape={} repeats={} threads={}",
            self.variant, self.p, self.shape, self.repeats, self.threads
        )?;
        writeln!(
            f,
            "{:>10} {:>14} {:>14} {:>14}",
            "n", "median_ms", "peak_cells", "peak_bytes"
        )?;
        for b in &self.points {
            writeln!(
                f,
                "{:>10} {:>14.3} {:>14} {:>14}",
                b.n, b.median_ms, b.peak_live_cells, b.peak_bytes
            )?;
        }
        match self.slope {
            Some(s) => writeln!(f, "fitted exponent: {s:.3}"),
            None => writeln!(f, "fitted exponent: n/a"),
        }
    }
}
