//! `bkc` — command-line front end for the b^k-plane library.
//!
//! Every machine-readable output is a single JSON document with a top-level
//! `"schema": 1` field. Exit codes: 0 when every emitted report passes, 1 when
//! any check fails or a computation errors out, 2 on usage errors.

use std::io::Write;
use std::process::ExitCode;

use bkplane::autgroups::{
    catalog, conjugate_through, elliptic_pullback, extendability_probe, halfplane_iso,
    hyperbolic_target, parabolic_target, plane_translation, probe_sequence, scaling_pullback_k1,
    ExtendProbe,
};
use bkplane::bkstructure::{is_bk_automorphism, DEFAULT_AUT_TOL, DEFAULT_NV_THRESHOLD};
use bkplane::dynamics::{integrate_flow, FlowProblem};
use bkplane::geometry::{pushforward_at, ComplexVectorField, PlanarMap, Point};
use bkplane::holospaces::{b_to_entire, bargmann_norm_sq, residual_sup, QuadratureSpec};
use bkplane::report::Status;
use bkplane::symexpr::{parse_expr, simplify, Expr, Sampler};
use bkplane::{run_suite, DomainTag};
use clap::{Args, Parser, Subcommand};
use serde_json::json;

/// Verifier and calculator for complex b^k-structures on the plane.
///
/// The random sampler seed defaults to 0 and can be overridden with the
/// BKC_SEED environment variable. Runs with identical arguments and seed
/// produce byte-identical JSON.
#[derive(Parser)]
#[command(name = "bkc", version, about, long_about = None)]
struct Cli {
    /// Emit JSON instead of aligned text (commands whose output is inherently
    /// structured always emit JSON).
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the full verification suite and report every check.
    VerifyAll(VerifyAllArgs),
    /// Test whether a map is an automorphism of the b^k-structure.
    CheckAut(CheckAutArgs),
    /// List the classified one-parameter automorphism families for a given k.
    Catalog(CatalogArgs),
    /// Probe whether a target-model automorphism extends across the singular
    /// locus when pulled back to the half-plane.
    ProbeExtend(ProbeExtendArgs),
    /// Integrate the flow of a complex vector field with fixed-step RK4.
    Flow(FlowArgs),
    /// Evaluate the sup of |L_k f| over a rectangular grid.
    Residual(ResidualArgs),
    /// Compute a Segal-Bargmann norm by Gauss-Hermite quadrature.
    Norm(NormArgs),
    /// Push a complex vector field forward through a map at a point.
    Pushforward(PushforwardArgs),
}

#[derive(Args)]
struct VerifyAllArgs {
    /// Comma-separated list of k values to verify.
    #[arg(long, value_delimiter = ',', default_value = "1,2")]
    k: Vec<u32>,
}

#[derive(Args)]
struct CheckAutArgs {
    #[arg(long)]
    k: u32,
    /// The candidate map, written "(u_expr, v_expr)".
    #[arg(long)]
    map: String,
    /// Proportionality tolerance on the cross-determinant.
    #[arg(long, default_value_t = DEFAULT_AUT_TOL)]
    tol: f64,
    /// Nowhere-vanishing floor on |lambda|.
    #[arg(long, default_value_t = DEFAULT_NV_THRESHOLD)]
    nv: f64,
}

#[derive(Args)]
struct CatalogArgs {
    #[arg(long)]
    k: u32,
}

#[derive(Args)]
struct ProbeExtendArgs {
    #[arg(long)]
    k: u32,
    /// One of: elliptic, hyperbolic, parabolic, translation, scaling.
    #[arg(long)]
    family: String,
    /// Group parameter of the probed automorphism.
    #[arg(long)]
    t: f64,
    /// Heights y0 at which to probe the limit x -> 0+.
    #[arg(long, value_delimiter = ',', default_value = "0,1")]
    y0: Vec<f64>,
}

#[derive(Args)]
struct FlowArgs {
    /// The vector field, written "(a_expr, b_expr)".
    #[arg(long)]
    vf: String,
    /// Starting point, written "x0,y0".
    #[arg(long)]
    p0: String,
    /// Flow time (either sign).
    #[arg(long)]
    t: f64,
    /// RK4 step size.
    #[arg(long, default_value_t = 1e-3)]
    h: f64,
    /// Write the trajectory as CSV rows "t,x,y" to this file.
    #[arg(long)]
    trace: Option<std::path::PathBuf>,
}

#[derive(Args)]
struct ResidualArgs {
    #[arg(long)]
    k: u32,
    /// The candidate b-holomorphic function as an expression in x, y.
    #[arg(long)]
    f: String,
    /// Grid specification "xmin:xmax:step,ymin:ymax:step".
    #[arg(long, default_value = "0.1:2:0.1,-3:3:0.25")]
    grid: String,
}

#[derive(Args)]
struct NormArgs {
    /// Entire function of w = x + i y on the plane.
    #[arg(long, conflicts_with = "bfunc")]
    entire: Option<String>,
    /// b-holomorphic function of x, y on the right half-plane; its entire
    /// pushforward is computed first.
    #[arg(long)]
    bfunc: Option<String>,
    /// Gauss-Hermite nodes per axis.
    #[arg(long, default_value_t = 64)]
    nodes: usize,
}

#[derive(Args)]
struct PushforwardArgs {
    /// The map, written "(u_expr, v_expr)".
    #[arg(long)]
    map: String,
    /// The vector field, written "(a_expr, b_expr)".
    #[arg(long)]
    vf: String,
    /// The base point, written "x0,y0".
    #[arg(long)]
    at: String,
}

/// Failures are split by exit code: usage errors (malformed expressions,
/// unknown family names) exit 2; runtime failures (evaluation errors, failed
/// verdicts) exit 1.
enum CliError {
    Usage(String),
    Runtime(String),
}

impl CliError {
    fn usage(msg: impl Into<String>) -> CliError {
        CliError::Usage(msg.into())
    }
    fn runtime(msg: impl std::fmt::Display) -> CliError {
        CliError::Runtime(msg.to_string())
    }
}

fn seed() -> Result<u64, CliError> {
    match std::env::var("BKC_SEED") {
        Ok(s) => s
            .parse()
            .map_err(|_| CliError::usage(format!("BKC_SEED is not an integer: {s}"))),
        Err(_) => Ok(0),
    }
}

/// Splits "(left, right)" at the top-level comma.
fn parse_pair(src: &str, what: &str) -> Result<(Expr, Expr), CliError> {
    let s = src.trim();
    let inner = s
        .strip_prefix('(')
        .and_then(|s| s.strip_suffix(')'))
        .ok_or_else(|| CliError::usage(format!("{what} must be written \"(expr, expr)\": {src}")))?;
    let mut depth = 0usize;
    for (i, c) in inner.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth = depth.saturating_sub(1),
            ',' if depth == 0 => {
                let parse = |t: &str| {
                    parse_expr(t).map_err(|e| CliError::usage(format!("in {what} \"{t}\": {e}")))
                };
                return Ok((parse(&inner[..i])?, parse(&inner[i + 1..])?));
            }
            _ => {}
        }
    }
    Err(CliError::usage(format!(
        "{what} needs two comma-separated components: {src}"
    )))
}

fn parse_point(src: &str) -> Result<Point, CliError> {
    let mut it = src.split(',').map(str::trim);
    let bad = || CliError::usage(format!("point must be written \"x0,y0\": {src}"));
    let x: f64 = it.next().ok_or_else(bad)?.parse().map_err(|_| bad())?;
    let y: f64 = it.next().ok_or_else(bad)?.parse().map_err(|_| bad())?;
    if it.next().is_some() {
        return Err(bad());
    }
    Ok(Point::new(x, y))
}

fn parse_map(src: &str) -> Result<PlanarMap, CliError> {
    let (u, v) = parse_pair(src, "map")?;
    Ok(PlanarMap::new(u, v, DomainTag::Plane))
}

fn parse_field(src: &str) -> Result<ComplexVectorField, CliError> {
    let (a, b) = parse_pair(src, "vector field")?;
    Ok(ComplexVectorField::new(a, b))
}

/// Grid spec "xmin:xmax:step,ymin:ymax:step".
fn parse_grid(src: &str) -> Result<Vec<(f64, f64)>, CliError> {
    let bad = || {
        CliError::usage(format!(
            "grid must be written \"xmin:xmax:step,ymin:ymax:step\": {src}"
        ))
    };
    let mut axes = Vec::new();
    for axis in src.split(',') {
        let parts: Vec<f64> = axis
            .split(':')
            .map(|t| t.trim().parse::<f64>())
            .collect::<Result<_, _>>()
            .map_err(|_| bad())?;
        if parts.len() != 3 || parts[2] <= 0.0 {
            return Err(bad());
        }
        axes.push((parts[0], parts[1], parts[2]));
    }
    if axes.len() != 2 {
        return Err(bad());
    }
    let (xa, ya) = (axes[0], axes[1]);
    Ok(bkplane::holospaces::grid(xa.0, xa.1, xa.2, ya.0, ya.1, ya.2))
}

fn emit(value: &serde_json::Value) {
    let line = serde_json::to_string(value).expect("serializable");
    // tolerate a closed pipe (e.g. piping into `head`)
    let _ = writeln!(std::io::stdout(), "{line}");
}

fn run(cli: Cli) -> Result<ExitCode, CliError> {
    match cli.command {
        Command::VerifyAll(a) => cmd_verify_all(a, cli.json),
        Command::CheckAut(a) => cmd_check_aut(a),
        Command::Catalog(a) => cmd_catalog(a, cli.json),
        Command::ProbeExtend(a) => cmd_probe_extend(a),
        Command::Flow(a) => cmd_flow(a),
        Command::Residual(a) => cmd_residual(a),
        Command::Norm(a) => cmd_norm(a),
        Command::Pushforward(a) => cmd_pushforward(a),
    }
}

fn cmd_verify_all(a: VerifyAllArgs, json: bool) -> Result<ExitCode, CliError> {
    if a.k.is_empty() || a.k.iter().any(|&k| k < 1) {
        return Err(CliError::usage("--k needs a list of integers >= 1"));
    }
    let seed = seed()?;
    let reports = run_suite(&a.k, seed);
    let failed = reports.iter().filter(|r| r.status == Status::Fail).count();
    if json {
        emit(&json!({
            "schema": 1,
            "seed": seed,
            "k": a.k,
            "failed": failed,
            "reports": reports,
        }));
    } else {
        for r in &reports {
            println!(
                "{:9} {:44} max error {:.3e}",
                format!("{:?}", r.status).to_lowercase(),
                r.check_name,
                r.max_error
            );
            for d in &r.details {
                println!(
                    "          - {} @ {}: observed {}, expected {}",
                    d.description, d.location, d.observed, d.expected
                );
            }
        }
        println!("{} checks, {} failed", reports.len(), failed);
    }
    Ok(if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    })
}

fn cmd_check_aut(a: CheckAutArgs) -> Result<ExitCode, CliError> {
    if a.k < 1 {
        return Err(CliError::usage("--k must be >= 1"));
    }
    let m = parse_map(&a.map)?;
    let s = Sampler::near_z(seed()?);
    let verdict = is_bk_automorphism(&m, a.k, &s, a.tol, a.nv).map_err(CliError::runtime)?;
    let holds = verdict.holds;
    emit(&json!({
        "schema": 1,
        "k": a.k,
        "map": a.map,
        "verdict": verdict,
    }));
    Ok(if holds {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    })
}

fn cmd_catalog(a: CatalogArgs, json: bool) -> Result<ExitCode, CliError> {
    let c = catalog(a.k).map_err(|e| CliError::usage(e.to_string()))?;
    if json {
        let families: Vec<_> = c
            .families
            .iter()
            .map(|f| {
                json!({
                    "name": f.name,
                    "min_k": f.k,
                    "map": format!("({}, {})", simplify(&f.map_of_t.u), simplify(&f.map_of_t.v)),
                })
            })
            .collect();
        emit(&json!({
            "schema": 1,
            "k": c.k,
            "families": families,
            "flip": format!("({}, {})", c.flip.u, c.flip.v),
        }));
    } else {
        println!("one-parameter automorphism families for k = {}:", c.k);
        for f in &c.families {
            println!("  {:24} t -> ({}, {})", f.name, simplify(&f.map_of_t.u), simplify(&f.map_of_t.v));
        }
        println!("  {:24} ({}, {})", "flip", c.flip.u, c.flip.v);
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_probe_extend(a: ProbeExtendArgs) -> Result<ExitCode, CliError> {
    let xs = probe_sequence();
    let probe_map = |m: &dyn Fn(Point) -> Result<Point, bkplane::GeomError>,
                     y0s: &[f64]|
     -> Result<Vec<ExtendProbe>, CliError> {
        y0s.iter()
            .map(|&y0| extendability_probe(m, y0, &xs).map_err(CliError::runtime))
            .collect()
    };
    let probes = match a.family.as_str() {
        "elliptic" => {
            if a.k < 2 {
                return Err(CliError::usage(
                    "the elliptic family lives on the upper half-plane target, which requires k >= 2",
                ));
            }
            let iso = halfplane_iso(a.k).map_err(CliError::runtime)?;
            probe_map(&|p| elliptic_pullback(&iso, a.t, p), &a.y0)?
        }
        "hyperbolic" | "parabolic" => {
            if a.k < 2 {
                return Err(CliError::usage(format!(
                    "the {} family requires k >= 2",
                    a.family
                )));
            }
            let iso = halfplane_iso(a.k).map_err(CliError::runtime)?;
            let target = if a.family == "hyperbolic" {
                hyperbolic_target()
            } else {
                parabolic_target()
            };
            let m = conjugate_through(&iso, &target.at_parameter(a.t));
            probe_map(&|p| m.apply(p), &a.y0)?
        }
        "translation" => {
            if a.k != 1 {
                return Err(CliError::usage("the translation family requires k = 1"));
            }
            let iso = halfplane_iso(1).map_err(CliError::runtime)?;
            let m = conjugate_through(&iso, &plane_translation(a.t, 0.0));
            probe_map(&|p| m.apply(p), &a.y0)?
        }
        "scaling" => {
            if a.k != 1 {
                return Err(CliError::usage("the scaling family requires k = 1"));
            }
            let m = scaling_pullback_k1(0.0, a.t);
            probe_map(&|p| m.apply(p), &a.y0)?
        }
        other => {
            return Err(CliError::usage(format!(
                "unknown family \"{other}\"; expected elliptic, hyperbolic, parabolic, translation, or scaling"
            )))
        }
    };
    emit(&json!({
        "schema": 1,
        "k": a.k,
        "family": a.family,
        "t": a.t,
        "probes": probes,
    }));
    Ok(ExitCode::SUCCESS)
}

fn cmd_flow(a: FlowArgs) -> Result<ExitCode, CliError> {
    if a.h <= 0.0 {
        return Err(CliError::usage("--h must be positive"));
    }
    let field = parse_field(&a.vf)?;
    let p0 = parse_point(&a.p0)?;
    let fp = FlowProblem::new(field, p0, a.t, a.h);
    let result = integrate_flow(&fp, a.trace.is_some()).map_err(CliError::runtime)?;
    if let Some(path) = &a.trace {
        let mut out = std::fs::File::create(path)
            .map_err(|e| CliError::runtime(format!("cannot write {}: {e}", path.display())))?;
        writeln!(out, "t,x,y").map_err(CliError::runtime)?;
        for (t, x, y) in &result.trajectory {
            writeln!(out, "{t},{x},{y}").map_err(CliError::runtime)?;
        }
    }
    emit(&json!({
        "schema": 1,
        "endpoint": result.endpoint,
        "event": result.event,
        "trace_rows": result.trajectory.len(),
    }));
    Ok(ExitCode::SUCCESS)
}

fn cmd_residual(a: ResidualArgs) -> Result<ExitCode, CliError> {
    let f = parse_expr(&a.f).map_err(|e| CliError::usage(format!("in --f: {e}")))?;
    let grid = parse_grid(&a.grid)?;
    let r = residual_sup(&f, a.k, &grid).map_err(CliError::runtime)?;
    emit(&json!({
        "schema": 1,
        "k": a.k,
        "f": a.f,
        "sup": r.sup,
        "symbolic_zero": r.symbolic_zero,
        "points_checked": r.points_checked,
    }));
    Ok(ExitCode::SUCCESS)
}

fn cmd_norm(a: NormArgs) -> Result<ExitCode, CliError> {
    let (entire, source) = match (&a.entire, &a.bfunc) {
        (Some(src), None) => {
            let e = parse_expr(src).map_err(|e| CliError::usage(format!("in --entire: {e}")))?;
            (e, json!({ "entire": src }))
        }
        (None, Some(src)) => {
            let f = parse_expr(src).map_err(|e| CliError::usage(format!("in --bfunc: {e}")))?;
            let p = b_to_entire(&f);
            if !p.verified {
                return Err(CliError::runtime(format!(
                    "could not verify an entire pushforward for \"{src}\""
                )));
            }
            (p.expr.clone(), json!({ "bfunc": src, "entire": p.expr.to_string() }))
        }
        _ => return Err(CliError::usage("exactly one of --entire or --bfunc is required")),
    };
    let q = QuadratureSpec {
        nodes: a.nodes,
        check_convergence: true,
    };
    let r = bargmann_norm_sq(&entire, &q).map_err(CliError::runtime)?;
    let converged = r.converged;
    emit(&json!({
        "schema": 1,
        "source": source,
        "value": r.value,
        "nodes": r.nodes,
        "converged": converged,
    }));
    Ok(if converged {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    })
}

fn cmd_pushforward(a: PushforwardArgs) -> Result<ExitCode, CliError> {
    let m = parse_map(&a.map)?;
    let field = parse_field(&a.vf)?;
    let p = parse_point(&a.at)?;
    let pushed = pushforward_at(&m, &field, p).map_err(CliError::runtime)?;
    let image = m.apply(p).map_err(CliError::runtime)?;
    emit(&json!({
        "schema": 1,
        "point": p,
        "image": image,
        "pushforward": [[pushed.0.re, pushed.0.im], [pushed.1.re, pushed.1.im]],
    }));
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(CliError::Usage(msg)) => {
            eprintln!("usage error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::FAILURE
        }
    }
}
