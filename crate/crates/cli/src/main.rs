use std::fs::File;
use std::io::{self, BufReader, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;
use std::time::Instant;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use pfd_core::bench::{self, BenchConfig};
use pfd_core::instances::{
    generate, read_points, write_points, write_selection, DataFormat, FrontShape, OutputMeta,
    SelectionRecord, ShapeTag,
};
use pfd_core::oracle::{brute_force, dispersion_cost, Method, Selection, Variant};
use pfd_core::refine::{polish, solve_hierarchic};
use pfd_core::{
    filter_dominated, maxmin, msm, msn, sort_front, validate, Backtrack, DispersionParams, Error,
    Parallelism, SortedFront,
};

#[derive(Parser)]
#[command(
    name = "pfd",
    version,
    about = "Dispersed subset selection on 2D Pareto fronts"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Select p dispersed points from a front.
    Solve(SolveArgs),
    /// Check that a point set is a valid front.
    Validate(InputArgs),
    /// Write a synthetic front as CSV.
    Generate(GenerateArgs),
    /// Time a dynamic program over increasing front sizes.
    Bench(BenchArgs),
    /// Optimal selections of all five variants side by side.
    Compare(CompareArgs),
}

#[derive(Args)]
struct InputArgs {
    /// Point file, or `-` for standard input.
    #[arg(long, short)]
    input: PathBuf,
    /// Input format; guessed from the file extension when omitted.
    #[arg(long)]
    format: Option<DataFormat>,
}

#[derive(Args)]
struct SolveArgs {
    #[command(flatten)]
    input: InputArgs,
    /// max-min, max-sum-neighbor, max-sum-min, hierarchic or brute:<variant>.
    #[arg(long)]
    variant: Route,
    #[arg(long)]
    p: usize,
    #[arg(long, default_value_t = 1.0)]
    alpha: f64,
    /// Drop dominated and duplicate points instead of rejecting the input.
    #[arg(long)]
    filter_dominated: bool,
    /// Which Max-Min optimum to report.
    #[arg(long, default_value = "min-indexes")]
    backtrack: BacktrackArg,
    /// Apply local polishing to Max-Min results.
    #[arg(long)]
    polish: bool,
    /// Worker threads for the dynamic programs; 0 uses all cores.
    #[arg(long, env = "PFD_THREADS", default_value_t = 0)]
    threads: usize,
    #[arg(long, default_value = "json")]
    output: DataFormat,
    /// Restrict brute force to selections containing both extremes.
    #[arg(long)]
    fix_extremes: bool,
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long)]
    shape: ShapeTag,
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Destination file; standard output when omitted.
    #[arg(long, short)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long)]
    variant: Variant,
    /// Comma-separated sizes; `2^k` is accepted.
    #[arg(long, value_delimiter = ',', value_parser = parse_size, required = true)]
    sizes: Vec<usize>,
    #[arg(long)]
    p: usize,
    #[arg(long, default_value = "staircase")]
    shape: ShapeTag,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 3)]
    repeats: usize,
    #[arg(long, default_value_t = 1.0)]
    alpha: f64,
    #[arg(long, env = "PFD_THREADS", default_value_t = 0)]
    threads: usize,
    /// Emit JSON instead of a table.
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct CompareArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long)]
    p: usize,
    #[arg(long, default_value_t = 1.0)]
    alpha: f64,
    /// Emit JSON instead of a table.
    #[arg(long)]
    json: bool,
}

#[derive(Clone, Copy)]
enum Route {
    Dp(Variant),
    Hierarchic,
    Brute(Variant),
}

impl FromStr for Route {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "hierarchic" {
            return Ok(Route::Hierarchic);
        }
        if let Some(v) = s.strip_prefix("brute:") {
            return v.parse().map(Route::Brute);
        }
        match s.parse()? {
            v @ (Variant::MaxSum | Variant::MaxMinSum) => {
                Err(format!("`{v}` has no dynamic program; use `brute:{v}`"))
            }
            v => Ok(Route::Dp(v)),
        }
    }
}

#[derive(Clone, Copy)]
struct BacktrackArg(Backtrack);

impl FromStr for BacktrackArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "min-indexes" => Ok(Self(Backtrack::MinIndexes)),
            "max-indexes" => Ok(Self(Backtrack::MaxIndexes)),
            _ => Err(format!("unknown backtrack direction `{s}`")),
        }
    }
}

fn parse_size(s: &str) -> Result<usize, String> {
    let s = s.trim();
    match s.strip_prefix("2^") {
        Some(k) => k
            .parse::<u32>()
            .ok()
            .and_then(|k| 1usize.checked_shl(k))
            .ok_or_else(|| format!("bad size `{s}`")),
        None => s.parse().map_err(|_| format!("bad size `{s}`")),
    }
}

fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<Error>() {
        Some(Error::Validation(_) | Error::EmptyFront | Error::NonFinite { .. }) => 2,
        Some(Error::InvalidP { .. }) => 3,
        Some(Error::BudgetExceeded { .. }) => 4,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut stdout = io::stdout().lock();
    let result = match cli.command {
        Command::Solve(args) => cmd_solve(&args, &mut stdout),
        Command::Validate(args) => cmd_validate(&args, &mut stdout),
        Command::Generate(args) => cmd_generate(&args, &mut stdout),
        Command::Bench(args) => cmd_bench(&args, &mut stdout),
        Command::Compare(args) => cmd_compare(&args, &mut stdout),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}

fn read_input(args: &InputArgs) -> anyhow::Result<Vec<pfd_core::Point2>> {
    let format = args.format.unwrap_or_else(|| guess_format(&args.input));
    let points = if args.input.as_os_str() == "-" {
        read_points(io::stdin().lock(), format)
    } else {
        let file = File::open(&args.input)
            .with_context(|| format!("cannot open {}", args.input.display()))?;
        read_points(BufReader::new(file), format)
    };
    Ok(points?)
}

fn guess_format(path: &Path) -> DataFormat {
    match path.extension().and_then(|e| e.to_str()) {
        Some(e) if e.eq_ignore_ascii_case("json") => DataFormat::Json,
        _ => DataFormat::Csv,
    }
}

fn load_front(args: &InputArgs, filter: bool) -> anyhow::Result<SortedFront> {
    let points = read_input(args)?;
    Ok(if filter {
        filter_dominated(&points)?
    } else {
        sort_front(&points)?
    })
}

fn solve(
    front: &SortedFront,
    args: &SolveArgs,
    params: DispersionParams,
) -> pfd_core::Result<Selection> {
    let par = Parallelism::threads(args.threads);
    let sel = match args.variant {
        Route::Dp(Variant::MaxMin) => maxmin::solve(front, args.p, params, args.backtrack.0, par)?,
        Route::Dp(Variant::MaxSumNeighbor) => msn::solve(front, args.p, params, par)?,
        Route::Dp(Variant::MaxSumMin) => msm::solve(front, args.p, params, par)?,
        Route::Dp(v) => unreachable!("`{v}` is rejected at parse time"),
        Route::Hierarchic => solve_hierarchic(front, args.p, params, par)?,
        Route::Brute(v) => brute_force(front, args.p, v, params, args.fix_extremes)?,
    };
    if !(args.polish && sel.variant == Variant::MaxMin) {
        return Ok(sel);
    }
    let anchored =
        sel.indices.first() == Some(&0) && sel.indices.last() == Some(&(front.len() - 1));
    if !anchored {
        eprintln!("note: selection does not contain both extremes; not polished");
        return Ok(sel);
    }
    let out = polish(front, &sel.indices, params)?;
    if out.indices == sel.indices {
        return Ok(sel);
    }
    Selection::evaluate(
        front,
        out.indices,
        Variant::MaxMin,
        params,
        Method::Polished,
    )
}

fn cmd_solve(args: &SolveArgs, out: &mut impl Write) -> anyhow::Result<u8> {
    let params = DispersionParams::new(args.alpha)?;
    let front = load_front(&args.input, args.filter_dominated)?;
    let start = Instant::now();
    let sel = solve(&front, args, params)?;
    let elapsed_ms = start.elapsed().as_secs_f64() * 1e3;

    let check = dispersion_cost(&front, &sel.indices, sel.variant, params)?;
    assert!(
        (check - sel.cost).abs() <= 1e-12 * check.abs().max(1.0),
        "reported cost {} does not match recomputed cost {check}",
        sel.cost
    );
    let meta = OutputMeta {
        alpha: args.alpha,
        elapsed_ms,
    };
    out.write_all(write_selection(&sel, &front, meta, args.output).as_bytes())?;
    Ok(0)
}

fn cmd_validate(args: &InputArgs, out: &mut impl Write) -> anyhow::Result<u8> {
    let points = read_input(args)?;
    let report = validate(&points)?;
    if report.ok {
        writeln!(out, "valid front of {} points", points.len())?;
        Ok(0)
    } else {
        eprintln!("{report}");
        Ok(2)
    }
}

fn cmd_generate(args: &GenerateArgs, out: &mut impl Write) -> anyhow::Result<u8> {
    let front = generate(FrontShape::new(args.shape, args.n, args.seed))?;
    let text = write_points(front.points());
    match &args.out {
        Some(path) => std::fs::write(path, text)
            .with_context(|| format!("cannot write {}", path.display()))?,
        None => out.write_all(text.as_bytes())?,
    }
    Ok(0)
}

fn cmd_bench(args: &BenchArgs, out: &mut impl Write) -> anyhow::Result<u8> {
    let report = bench::run(&BenchConfig {
        variant: args.variant,
        sizes: args.sizes.clone(),
        p: args.p,
        shape: args.shape,
        seed: args.seed,
        repeats: args.repeats,
        alpha: args.alpha,
        parallelism: Parallelism::threads(args.threads),
    })?;
    if args.json {
        serde_json::to_writer(&mut *out, &report)?;
        writeln!(out)?;
    } else {
        write!(out, "{report}")?;
    }
    Ok(0)
}

/// Largest front on which compare cross-checks dynamic programs against
/// enumeration.
const CROSS_CHECK_MAX_N: usize = 14;

fn cmd_compare(args: &CompareArgs, out: &mut impl Write) -> anyhow::Result<u8> {
    let params = DispersionParams::new(args.alpha)?;
    let front = load_front(&args.input, false)?;
    let par = Parallelism::sequential();
    let p = args.p;
    let mut rows = Vec::new();
    let mut mismatches = 0;
    for v in Variant::ALL {
        let sel = match v {
            Variant::MaxMin => maxmin::solve(&front, p, params, Backtrack::MinIndexes, par)?,
            Variant::MaxSumNeighbor => msn::solve(&front, p, params, par)?,
            Variant::MaxSumMin => msm::solve(&front, p, params, par)?,
            Variant::MaxSum | Variant::MaxMinSum => brute_force(&front, p, v, params, false)?,
        };
        let check = if sel.method == Method::Dp && front.len() <= CROSS_CHECK_MAX_N {
            let b = brute_force(&front, p, v, params, false)?;
            let ok = (b.cost - sel.cost).abs() <= 1e-9 * b.cost.abs().max(1.0);
            if !ok {
                mismatches += 1;
            }
            Some(ok)
        } else {
            None
        };
        rows.push((
            SelectionRecord::new(
                &sel,
                &front,
                OutputMeta {
                    alpha: args.alpha,
                    elapsed_ms: 0.0,
                },
            ),
            check,
        ));
    }
    if args.json {
        let value: Vec<_> = rows
            .iter()
            .map(|(r, check)| {
                serde_json::json!({
                    "variant": r.variant,
                    "indices": r.indices,
                    "cost": r.cost,
                    "method": r.method,
                    "oracle_agrees": check,
                })
            })
            .collect();
        serde_json::to_writer(&mut *out, &value)?;
        writeln!(out)?;
    } else {
        writeln!(
            out,
            "{:<18} {:<12} {:>22}  {:<24} oracle",
            "variant", "method", "cost", "indices"
        )?;
        for (r, check) in &rows {
            let indices = format!("{:?}", r.indices);
            let check = match check {
                Some(true) => "agrees",
                Some(false) => "MISMATCH",
                None => "-",
            };
            writeln!(
                out,
                "{:<18} {:<12} {:>22?}  {:<24} {check}",
                r.variant, r.method, r.cost, indices
            )?;
        }
    }
    if mismatches > 0 {
        bail!("{mismatches} dynamic program(s) disagree with enumeration");
    }
    Ok(0)
}
