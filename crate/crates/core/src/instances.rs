//! Synthetic fronts, point-set parsing and selection output.

use std::fmt;
use std::io::Read;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::front::{sort_front, Point2, SortedFront};
use crate::oracle::Selection;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ShapeTag {
    /// Collinear points on `x + y = n`, `x` in `[0, n]`.
    Affine,
    /// Quarter circle of radius `n` centred at the origin.
    ConvexArc,
    /// Quarter circle of radius `n` centred at `(n, n)`.
    ConcaveArc,
    /// Random positive steps on both axes.
    Staircase,
    /// Staircase split into about `sqrt(n)` groups separated by wide gaps.
    Clustered,
}

impl ShapeTag {
    pub const ALL: [ShapeTag; 5] = [
        ShapeTag::Affine,
        ShapeTag::ConvexArc,
        ShapeTag::ConcaveArc,
        ShapeTag::Staircase,
        ShapeTag::Clustered,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            ShapeTag::Affine => "affine",
            ShapeTag::ConvexArc => "convex-arc",
            ShapeTag::ConcaveArc => "concave-arc",
            ShapeTag::Staircase => "staircase",
            ShapeTag::Clustered => "clustered",
        }
    }
}

impl fmt::Display for ShapeTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ShapeTag {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        ShapeTag::ALL
            .into_iter()
            .find(|t| t.name() == s)
            .ok_or_else(|| format!("unknown shape `{s}`"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FrontShape {
    pub tag: ShapeTag,
    pub n: usize,
    pub seed: u64,
}

impl FrontShape {
    pub fn new(tag: ShapeTag, n: usize, seed: u64) -> Self {
        Self { tag, n, seed }
    }
}

const GAP: f64 = 25.0;

/// Increments in `[0.05, 1)`: bounded away from zero so partial sums stay
/// strictly increasing at any magnitude reached here.
fn step(rng: &mut ChaCha8Rng) -> f64 {
    0.05 + 0.95 * rng.gen::<f64>()
}

/// `n` strictly increasing values from `0` to `1`.
fn unit_positions(n: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let mut acc = 0.0;
    let mut out = Vec::with_capacity(n);
    out.push(0.0);
    for _ in 1..n {
        acc += step(rng);
        out.push(acc);
    }
    let total = acc;
    if n > 1 {
        for v in &mut out {
            *v /= total;
        }
        out[n - 1] = 1.0;
    }
    out
}

fn staircase(n: usize, group: Option<usize>, rng: &mut ChaCha8Rng) -> Vec<Point2> {
    let mut x = 0.0;
    let mut y = 0.0;
    let mut xs = Vec::with_capacity(n);
    let mut ys = Vec::with_capacity(n);
    for i in 0..n {
        if i > 0 {
            let jump = match group {
                Some(g) if i % g == 0 => GAP,
                _ => 0.0,
            };
            x += step(rng) + jump;
            y += step(rng) + jump;
        }
        xs.push(x);
        ys.push(y);
    }
    let top = y;
    xs.into_iter()
        .zip(ys)
        .map(|(x, y)| Point2::new(x, top - y))
        .collect()
}

/// Deterministic front of exactly `shape.n` points.
pub fn generate(shape: FrontShape) -> Result<SortedFront> {
    let n = shape.n;
    if n == 0 {
        return Err(Error::EmptyFront);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(shape.seed);
    let r = n as f64;
    let points: Vec<Point2> = match shape.tag {
        ShapeTag::Affine => unit_positions(n, &mut rng)
            .into_iter()
            .map(|t| Point2::new(r * t, r - r * t))
            .collect(),
        ShapeTag::ConvexArc => unit_positions(n, &mut rng)
            .into_iter()
            .map(|t| {
                let (s, c) = (t * std::f64::consts::FRAC_PI_2).sin_cos();
                Point2::new(r * s, r * c)
            })
            .collect(),
        ShapeTag::ConcaveArc => unit_positions(n, &mut rng)
            .into_iter()
            .map(|t| {
                let (s, c) = (t * std::f64::consts::FRAC_PI_2).sin_cos();
                Point2::new(r - r * c, r - r * s)
            })
            .collect(),
        ShapeTag::Staircase => staircase(n, None, &mut rng),
        ShapeTag::Clustered => {
            let groups = (r.sqrt().ceil() as usize).max(1);
            staircase(n, Some(n.div_ceil(groups)), &mut rng)
        }
    };
    sort_front(&points)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DataFormat {
    #[default]
    Csv,
    Json,
}

impl FromStr for DataFormat {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "csv" => Ok(DataFormat::Csv),
            "json" => Ok(DataFormat::Json),
            _ => Err(format!("unknown format `{s}`")),
        }
    }
}

impl fmt::Display for DataFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DataFormat::Csv => "csv",
            DataFormat::Json => "json",
        })
    }
}

/// Points in file order, neither validated nor sorted.
///
/// CSV: one `x,y` pair per line, `#` comment lines, optional `x,y` header.
/// JSON: an array of `[x, y]` arrays.
pub fn read_points<R: Read>(source: R, format: DataFormat) -> Result<Vec<Point2>> {
    let points = match format {
        DataFormat::Csv => read_csv(source)?,
        DataFormat::Json => {
            let raw: Vec<[f64; 2]> = serde_json::from_reader(source).map_err(|e| Error::Parse {
                location: format!("line {}, column {}", e.line(), e.column()),
                message: e.to_string(),
            })?;
            raw.into_iter().map(Point2::from).collect()
        }
    };
    if let Some(index) = points.iter().position(|p| !p.is_finite()) {
        return Err(Error::NonFinite { index });
    }
    Ok(points)
}

fn read_csv<R: Read>(source: R) -> Result<Vec<Point2>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(source);
    let mut points = Vec::new();
    let mut first = true;
    for record in reader.records() {
        let record = record.map_err(|e| Error::Parse {
            location: e
                .position()
                .map_or_else(|| "unknown".into(), |p| format!("line {}", p.line())),
            message: e.to_string(),
        })?;
        let line = record.position().map_or(0, |p| p.line());
        let is_header = first
            && record.len() == 2
            && record[0].eq_ignore_ascii_case("x")
            && record[1].eq_ignore_ascii_case("y");
        first = false;
        if is_header {
            continue;
        }
        let parse_error = |message: String| Error::Parse {
            location: format!("line {line}"),
            message,
        };
        if record.len() != 2 {
            return Err(parse_error(format!(
                "expected 2 fields, found {}",
                record.len()
            )));
        }
        let coord = |k: usize| {
            record[k]
                .parse::<f64>()
                .map_err(|e| parse_error(format!("field {}: `{}`: {e}", k + 1, &record[k])))
        };
        points.push(Point2::new(coord(0)?, coord(1)?));
    }
    Ok(points)
}

/// Output fields not carried by [`Selection`].
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct OutputMeta {
    pub alpha: f64,
    pub elapsed_ms: f64,
}

/// Serialized form of a solved instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionRecord {
    pub variant: String,
    pub p: usize,
    pub alpha: f64,
    pub n: usize,
    pub method: String,
    pub indices: Vec<usize>,
    pub points: Vec<[f64; 2]>,
    pub cost: f64,
    pub secondary_cost: Option<f64>,
    pub elapsed_ms: f64,
}

impl SelectionRecord {
    pub fn new(selection: &Selection, front: &SortedFront, meta: OutputMeta) -> Self {
        Self {
            variant: selection.variant.name().to_string(),
            p: selection.p,
            alpha: meta.alpha,
            n: front.len(),
            method: selection.method.to_string(),
            indices: selection.indices.clone(),
            points: selection
                .indices
                .iter()
                .map(|&i| {
                    let q = front.point(i);
                    [q.x, q.y]
                })
                .collect(),
            cost: selection.cost,
            secondary_cost: selection.secondary_cost,
            elapsed_ms: meta.elapsed_ms,
        }
    }
}

/// JSON object or `index,x,y` CSV rows, newline terminated. Reals use the
/// shortest representation that parses back to the same value.
pub fn write_selection(
    selection: &Selection,
    front: &SortedFront,
    meta: OutputMeta,
    format: DataFormat,
) -> String {
    let record = SelectionRecord::new(selection, front, meta);
    match format {
        DataFormat::Json => {
            let mut s = serde_json::to_string(&record).expect("record is serializable");
            s.push('\n');
            s
        }
        DataFormat::Csv => {
            let mut s = String::from("index,x,y\n");
            for (i, [x, y]) in record.indices.iter().zip(&record.points) {
                s.push_str(&format!("{i},{x:?},{y:?}\n"));
            }
            s
        }
    }
}

/// Points as `x,y` CSV with a header line.
pub fn write_points(points: &[Point2]) -> String {
    let mut s = String::from("x,y\n");
    for q in points {
        s.push_str(&format!("{:?},{:?}\n", q.x, q.y));
    }
    s
}
