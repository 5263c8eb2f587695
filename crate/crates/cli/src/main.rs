//! `segspace`: verification suites, geodesic integration, stratification
//! diagrams and segment reports.

mod check;
mod config;

use std::fs;
use std::io::{self, Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{CommandFactory, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use segspace::geodesic::{
    integrate_geodesic, random_initial_data, residuals_l, residuals_m, Drift, GeodesicTrajectory, IntegrateOptions,
    Termination, DRIFT_FLOOR,
};
use segspace::orbifold::stratification;
use segspace::segment::{collinearity_defect, ends, is_n_segment, normalize_ends, psi_inv, split_l};
use segspace::{PolyPoint, Space, DEFAULT_TOL};

use config::{Tolerances, DEFAULT_DT, DEFAULT_MAX_N, DEFAULT_SEED, DEFAULT_TRIALS, DEFAULT_T_FINAL};

#[derive(Parser)]
#[command(name = "segspace", version, about = "Geometry of n-gons degenerated to segments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the invariant suites for each n and emit a JSON report.
    Check(CheckArgs),
    /// Integrate one geodesic; CSV trajectory plus a JSON drift summary.
    Geodesic(GeodesicArgs),
    /// Emit the fixed-point stratification for n as JSON or DOT.
    Strata(StrataArgs),
    /// Report membership and decomposition for a polygon JSON file.
    Segment(SegmentArgs),
}

#[derive(clap::Args)]
struct CheckArgs {
    /// A single n or an inclusive range `A..B`.
    #[arg(long, value_name = "N|A..B", conflicts_with = "n_range")]
    n: Option<String>,
    /// Inclusive range `A..B`.
    #[arg(long, value_name = "A..B")]
    n_range: Option<String>,
    /// Largest n accepted.
    #[arg(long, default_value_t = DEFAULT_MAX_N)]
    max_n: usize,
    /// Collinearity tolerance.
    #[arg(long, default_value_t = DEFAULT_TOL)]
    tol: f64,
    /// Random points per n for the segment and ruling suites.
    #[arg(long, default_value_t = DEFAULT_TRIALS)]
    trials: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_DT)]
    dt: f64,
    #[arg(long, default_value_t = DEFAULT_T_FINAL)]
    t_final: f64,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum SpaceArg {
    M,
    L,
}

impl From<SpaceArg> for Space {
    fn from(s: SpaceArg) -> Space {
        match s {
            SpaceArg::M => Space::M,
            SpaceArg::L => Space::L,
        }
    }
}

#[derive(clap::Args)]
struct GeodesicArgs {
    #[arg(long, value_enum, default_value = "m")]
    space: SpaceArg,
    /// Number of vertices; required unless `--q` is given.
    #[arg(long)]
    n: Option<usize>,
    /// Chart-2 position `x,y,r3,…,rn[,u,v]`; random when omitted.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, requires = "v")]
    q: Option<Vec<f64>>,
    /// Chart-2 velocity, same layout as `--q`.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, requires = "q")]
    v: Option<Vec<f64>>,
    /// Velocity scale for random initial data.
    #[arg(long, default_value_t = 1.0)]
    speed: f64,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_DT)]
    dt: f64,
    #[arg(long, default_value_t = DEFAULT_T_FINAL)]
    t_final: f64,
    /// Also integrate at dt/2 and report the drift ratio.
    #[arg(long)]
    halve: bool,
    /// Write the CSV here; the summary then goes to stdout. Without it the CSV
    /// goes to stdout and the summary to stderr.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Dot,
}

#[derive(clap::Args)]
struct StrataArgs {
    #[arg(long)]
    n: usize,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(clap::Args)]
struct SegmentArgs {
    /// Polygon JSON `{"n": …, "vertices": [[re, im], …]}`; `-` reads stdin.
    input: PathBuf,
    #[arg(long, default_value_t = DEFAULT_TOL)]
    tol: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn usage_error(msg: impl std::fmt::Display) -> ! {
    Cli::command().error(clap::error::ErrorKind::ValueValidation, msg).exit()
}

/// Parses `N`, `A..B` or `A..=B` (both range forms inclusive).
fn parse_n_range(s: &str) -> Result<(usize, usize), String> {
    let num = |t: &str| t.trim().parse::<usize>().map_err(|e| format!("invalid n '{t}': {e}"));
    match s.split_once("..") {
        None => num(s).map(|n| (n, n)),
        Some((a, b)) => {
            let (a, b) = (num(a)?, num(b.strip_prefix('=').unwrap_or(b))?);
            if a > b {
                Err(format!("empty range {s}"))
            } else {
                Ok((a, b))
            }
        }
    }
}

fn emit(out: Option<&PathBuf>, text: &str) -> io::Result<()> {
    match out {
        Some(path) => fs::write(path, text),
        None => io::stdout().write_all(text.as_bytes()),
    }
}

fn pretty(v: &impl Serialize) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("plain data serializes");
    s.push('\n');
    s
}

fn run_check(args: CheckArgs) -> io::Result<ExitCode> {
    let spec =
        args.n.as_deref().or(args.n_range.as_deref()).unwrap_or_else(|| usage_error("--n or --n-range is required"));
    let (lo, hi) = parse_n_range(spec).unwrap_or_else(|e| usage_error(e));
    if lo < 3 {
        usage_error(format!("n must be at least 3, got {lo}"));
    }
    if hi > args.max_n {
        usage_error(format!("n = {hi} exceeds --max-n {}", args.max_n));
    }
    let tol = Tolerances::with_membership(args.tol);
    let reports: Vec<_> =
        (lo..=hi).map(|n| check::check_n(n, args.seed, args.trials, args.dt, args.t_final, &tol)).collect();
    let first_failure = reports.iter().find_map(|r| {
        r.first_failure()
            .map(|i| json!({"n": r.n, "invariant": i.name, "residual": i.residual, "threshold": i.threshold}))
    });
    let report = json!({
        "command": "check",
        "config": {"n": [lo, hi], "seed": args.seed, "trials": args.trials, "dt": args.dt, "t_final": args.t_final, "tolerances": tol},
        "pass": first_failure.is_none(),
        "first_failure": first_failure,
        "results": reports,
    });
    emit(args.out.as_ref(), &pretty(&report))?;
    Ok(match first_failure {
        None => ExitCode::SUCCESS,
        Some(f) => {
            eprintln!("check failed: n = {}, invariant {}", f["n"], f["invariant"]);
            ExitCode::FAILURE
        }
    })
}

#[derive(Serialize)]
struct RunSummary {
    dt: f64,
    steps: usize,
    termination: Termination,
    drift: Drift,
    max_drift: f64,
    residuals: Value,
}

fn summarize(traj: &GeodesicTrajectory, dt: f64) -> RunSummary {
    let drift = traj.drift();
    let residuals = match traj.space {
        Space::M => serde_json::to_value(residuals_m(traj).summary()),
        Space::L => serde_json::to_value(residuals_l(traj).summary()),
    }
    .expect("plain data serializes");
    RunSummary {
        dt,
        steps: traj.len().saturating_sub(1),
        termination: traj.termination.clone(),
        max_drift: drift.max_for(traj.space),
        drift,
        residuals,
    }
}

fn run_geodesic(args: GeodesicArgs) -> io::Result<ExitCode> {
    let space = Space::from(args.space);
    let (q, v) = match (args.q, args.v) {
        (Some(q), Some(v)) => (q, v),
        _ => {
            let n = args.n.unwrap_or_else(|| usage_error("give --n for random data or both --q and --v"));
            if n < 3 {
                usage_error(format!("n must be at least 3, got {n}"));
            }
            random_initial_data(space, n, args.speed, &mut ChaCha8Rng::seed_from_u64(args.seed))
        }
    };
    let opts = IntegrateOptions::new(args.dt, args.t_final);
    let traj = match integrate_geodesic(space, &q, &v, &opts) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: {e}");
            return Ok(ExitCode::from(2));
        }
    };
    let mut runs = vec![summarize(&traj, args.dt)];
    if args.halve {
        if let Ok(half) = integrate_geodesic(space, &q, &v, &IntegrateOptions { dt: args.dt / 2.0, ..opts }) {
            runs.push(summarize(&half, args.dt / 2.0));
        }
    }
    let ratio = (runs.len() == 2).then(|| runs[0].max_drift / runs[1].max_drift);
    let summary = json!({
        "command": "geodesic",
        "config": {"space": space, "seed": args.seed, "speed": args.speed, "dt": args.dt, "t_final": args.t_final, "q0": q, "v0": v},
        "runs": runs,
        "drift_ratio": ratio,
        "ratio_resolved": ratio.map(|_| runs[1].max_drift > DRIFT_FLOOR),
    });
    let csv = traj.to_csv();
    match &args.out {
        Some(path) => {
            fs::write(path, csv)?;
            io::stdout().write_all(pretty(&summary).as_bytes())?;
        }
        None => {
            io::stdout().write_all(csv.as_bytes())?;
            io::stderr().write_all(pretty(&summary).as_bytes())?;
        }
    }
    Ok(match traj.termination {
        Termination::Completed => ExitCode::SUCCESS,
        ref t => {
            eprintln!("integration stopped early: {}", serde_json::to_string(t).expect("plain data serializes"));
            ExitCode::FAILURE
        }
    })
}

fn run_strata(args: StrataArgs) -> io::Result<ExitCode> {
    if args.n < 3 {
        usage_error(format!("n must be at least 3, got {}", args.n));
    }
    let s = stratification(args.n).expect("n ≥ 3");
    let text = match args.format {
        Format::Dot => s.to_dot(),
        Format::Json => {
            let mut v = serde_json::to_value(&s).expect("plain data serializes");
            if s.is_empty() {
                v["note"] =
                    json!(format!("n = {} is prime: the action is free and the singular locus is empty", args.n));
            }
            pretty(&v)
        }
    };
    emit(args.out.as_ref(), &text)?;
    Ok(ExitCode::SUCCESS)
}

fn pairs(z: &PolyPoint) -> Vec<[f64; 2]> {
    z.vertices().iter().map(|w| [w.re, w.im]).collect()
}

fn run_segment(args: SegmentArgs) -> io::Result<ExitCode> {
    let text = if args.input.as_os_str() == "-" {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s)?;
        s
    } else {
        fs::read_to_string(&args.input)?
    };
    let z = match PolyPoint::from_json(&text) {
        Ok(z) => z,
        Err(e) => {
            eprintln!("error: {}: {e}", args.input.display());
            return Ok(ExitCode::FAILURE);
        }
    };
    let is_segment = is_n_segment(&z, args.tol);
    let mut report = json!({
        "n": z.n(),
        "tolerance": args.tol,
        "is_segment": is_segment,
        "collinearity_defect": collinearity_defect(&z),
        "degenerate": z.is_diagonal(),
    });
    if is_segment {
        if let Ok((m, b)) = split_l(&z, args.tol) {
            report["split_l"] = json!({"m": pairs(&m), "b": [b.re, b.im]});
            if let Ok(c) = psi_inv(&m, args.tol) {
                report["psi_inv"] = json!({"x": c.profile(), "theta": c.theta()});
            }
        }
        if let Ok(e) = ends(&z, args.tol) {
            report["ends"] = json!(e.iter().map(|i| i + 1).collect::<Vec<_>>());
        }
        if let Ok(u) = normalize_ends(&z, args.tol) {
            report["normalize_ends"] = json!(pairs(&u));
        }
    }
    emit(args.out.as_ref(), &pretty(&report))?;
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Check(a) => run_check(a),
        Command::Geodesic(a) => run_geodesic(a),
        Command::Strata(a) => run_strata(a),
        Command::Segment(a) => run_segment(a),
    };
    result.unwrap_or_else(|e| {
        eprintln!("error: {e}");
        ExitCode::FAILURE
    })
}
