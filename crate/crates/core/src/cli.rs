//! The `funkarea` command-line tool.
//!
//! Exit codes: 0 success, 2 usage or configuration error, 3 domain error
//! (interior violation, degenerate body, Taylor guard, ...), 4 non-convergence
//! or per-point failures in `field`. Errors are written to stderr as one JSON
//! object `{"error": <kind>, "message": <text>}`.
//!
//! CSV numbers use `{:.16e}` (17 significant digits).

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::balance::{balanced_field, balancing_point, BalanceOptions, FieldOptions, FieldSpec};
use crate::bodies::{BodySpec, ConvexBody};
use crate::error::{FunkError, Result};
use crate::funk::{area, area_derivative_with, cm_coefficient, taylor_build, AreaMethod, FunkContext, IndicatrixSamples, MultiIndex};
use crate::quadrature::{build_rule, default_resolution, SphereRule};
use crate::{Vector, DEFAULT_MARGIN};

#[derive(Debug, Parser)]
#[command(name = "funkarea", version, about = "Funk area function of smooth convex bodies")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Csv,
    Json,
}

#[derive(Debug, Args)]
struct Common {
    /// Quadrature resolution (default 256 for n = 2, 64 for n = 3).
    #[arg(long)]
    resolution: Option<usize>,
    /// Interior margin: points must satisfy L(p) ≤ 1 - margin.
    #[arg(long, default_value_t = DEFAULT_MARGIN)]
    margin: f64,
    /// Output format (default text, csv for scan and field).
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Write output to this file instead of stdout.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct Solver {
    /// Stop when |grad r| ≤ tol.
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
    #[arg(long, default_value_t = 100)]
    max_iter: usize,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Scan the metric tensor for positive definiteness.
    Check {
        body: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Area r(p) of the indicatrix at base point p.
    Area {
        body: PathBuf,
        /// Base point, comma separated.
        #[arg(long, allow_hyphen_values = true)]
        point: String,
        #[arg(long, default_value = "direct")]
        method: AreaMethod,
        #[command(flatten)]
        common: Common,
    },
    /// Partial derivative ∂^α r(p).
    Deriv {
        body: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        point: String,
        /// Multi-index, e.g. 2,0,0.
        #[arg(long)]
        alpha: String,
        #[arg(long, default_value = "direct")]
        method: AreaMethod,
        #[command(flatten)]
        common: Common,
    },
    /// Taylor coefficients of r around a center, optionally evaluated.
    Taylor {
        body: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        center: String,
        #[arg(long)]
        order: usize,
        /// Evaluation point (repeatable).
        #[arg(long, allow_hyphen_values = true)]
        eval: Vec<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Balancing point (minimizer of r).
    Balance {
        body: PathBuf,
        #[command(flatten)]
        solver: Solver,
        #[command(flatten)]
        common: Common,
    },
    /// r(s·d) for s on a uniform grid a:b:n.
    Scan {
        body: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        grid: String,
        /// Direction d (default e_n).
        #[arg(long, allow_hyphen_values = true)]
        direction: Option<String>,
        #[arg(long, default_value = "direct")]
        method: AreaMethod,
        #[command(flatten)]
        common: Common,
    },
    /// Balancing vector field over a parameter grid.
    Field {
        field: PathBuf,
        #[command(flatten)]
        solver: Solver,
        /// Start every point at the origin and run points in parallel.
        #[arg(long)]
        no_warm_start: bool,
        #[command(flatten)]
        common: Common,
    },
}

fn parse_vector(text: &str, what: &str) -> Result<Vector> {
    let values = text
        .split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| FunkError::Config(format!("bad {what} entry `{t}` in `{text}`")))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Vector::from_vec(values))
}

fn parse_point(text: &str, n: usize, what: &str) -> Result<Vector> {
    let v = parse_vector(text, what)?;
    if v.len() != n {
        return Err(FunkError::DimensionMismatch {
            expected: n,
            found: v.len(),
        });
    }
    Ok(v)
}

fn parse_grid(text: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = text.split(':').collect();
    let bad = || FunkError::Config(format!("grid must be a:b:n (got `{text}`)"));
    if parts.len() != 3 {
        return Err(bad());
    }
    let a: f64 = parts[0].trim().parse().map_err(|_| bad())?;
    let b: f64 = parts[1].trim().parse().map_err(|_| bad())?;
    let n: usize = parts[2].trim().parse().map_err(|_| bad())?;
    if n == 0 || !a.is_finite() || !b.is_finite() {
        return Err(bad());
    }
    if n == 1 {
        return Ok(vec![a]);
    }
    Ok((0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect())
}

fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn csv_row(values: impl IntoIterator<Item = f64>) -> String {
    values.into_iter().map(num).collect::<Vec<_>>().join(",")
}

fn indexed(prefix: &str, n: usize) -> Vec<String> {
    (0..n).map(|i| format!("{prefix}{i}")).collect()
}

fn load_body(path: &PathBuf) -> Result<ConvexBody> {
    BodySpec::from_path(path)?.build()
}

fn rule_for(n: usize, common: &Common) -> Result<SphereRule> {
    build_rule(n, common.resolution.unwrap_or_else(|| default_resolution(n)))
}

fn check_margin(margin: f64) -> Result<()> {
    if !(margin > 0.0 && margin < 1.0) {
        return Err(FunkError::Config(format!("margin must lie in (0, 1) (got {margin})")));
    }
    Ok(())
}

fn balance_options(solver: &Solver, margin: f64) -> Result<BalanceOptions> {
    if !(solver.tol > 0.0) {
        return Err(FunkError::Config(format!("tol must be positive (got {})", solver.tol)));
    }
    Ok(BalanceOptions {
        tol: solver.tol,
        max_iter: solver.max_iter,
        margin,
    })
}

struct Output {
    text: String,
    /// Exit status to report once the output is written.
    status: i32,
}

impl From<String> for Output {
    fn from(text: String) -> Self {
        Self { text, status: 0 }
    }
}

fn json_text(value: serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(&value).expect("JSON values always serialize");
    s.push('\n');
    s
}

fn vec_json(v: &Vector) -> serde_json::Value {
    json!(v.iter().copied().collect::<Vec<f64>>())
}

fn execute(command: &Command) -> Result<Output> {
    match command {
        Command::Check { body, common } => {
            check_margin(common.margin)?;
            let body = load_body(body)?;
            let rule = rule_for(body.dimension(), common)?;
            let report = body.validate(&rule)?;
            Ok(match common.format.unwrap_or(Format::Text) {
                Format::Json => json_text(json!({ "kind": body.kind(), "dimension": body.dimension(), "report": report })),
                Format::Csv => format!(
                    "min_metric_eigenvalue,margin,is_strongly_convex,{}\n{},{},{},{}\n",
                    indexed("worst", body.dimension()).join(","),
                    num(report.min_metric_eigenvalue),
                    num(report.margin),
                    report.is_strongly_convex,
                    csv_row(report.worst_node.iter().copied()),
                ),
                Format::Text => format!(
                    "kind: {}\ndimension: {}\nstrongly convex: {}\nmin metric eigenvalue: {:e}\neigenvalue ratio: {:e}\nworst direction: {:?}\n",
                    body.kind(),
                    body.dimension(),
                    report.is_strongly_convex,
                    report.min_metric_eigenvalue,
                    report.margin,
                    report.worst_node
                ),
            }
            .into())
        }
        Command::Area {
            body,
            point,
            method,
            common,
        } => {
            check_margin(common.margin)?;
            let body = load_body(body)?;
            let n = body.dimension();
            let p = parse_point(point, n, "point")?;
            let rule = rule_for(n, common)?;
            let ctx = FunkContext::with_margin(&body, p.clone(), common.margin)?;
            let r = area(&ctx, &rule, *method)?;
            Ok(match common.format.unwrap_or(Format::Text) {
                Format::Json => json_text(json!({ "point": vec_json(&p), "method": method.to_string(), "area": r })),
                Format::Csv => format!("{},area\n{},{}\n", indexed("p", n).join(","), csv_row(p.iter().copied()), num(r)),
                Format::Text => format!("{r}\n"),
            }
            .into())
        }
        Command::Deriv {
            body,
            point,
            alpha,
            method,
            common,
        } => {
            check_margin(common.margin)?;
            let body = load_body(body)?;
            let n = body.dimension();
            let p = parse_point(point, n, "point")?;
            let alpha: MultiIndex = alpha.parse()?;
            if alpha.len() != n {
                return Err(FunkError::DimensionMismatch {
                    expected: n,
                    found: alpha.len(),
                });
            }
            let rule = rule_for(n, common)?;
            let ctx = FunkContext::with_margin(&body, p.clone(), common.margin)?;
            let value = area_derivative_with(&ctx, &rule, &alpha, *method)?;
            let cm = cm_coefficient(n, alpha.order());
            Ok(match common.format.unwrap_or(Format::Text) {
                Format::Json => json_text(json!({
                    "point": vec_json(&p),
                    "alpha": alpha.exponents(),
                    "order": alpha.order(),
                    "c_m": cm,
                    "value": value,
                })),
                Format::Csv => format!(
                    "{},{},order,c_m,value\n{},{},{},{},{}\n",
                    indexed("p", n).join(","),
                    indexed("alpha", n).join(","),
                    csv_row(p.iter().copied()),
                    alpha.exponents().iter().map(|a| a.to_string()).collect::<Vec<_>>().join(","),
                    alpha.order(),
                    num(cm),
                    num(value)
                ),
                Format::Text => format!("alpha: {alpha}\norder: {}\nc_m: {cm}\nvalue: {value}\n", alpha.order()),
            }
            .into())
        }
        Command::Taylor {
            body,
            center,
            order,
            eval,
            common,
        } => {
            check_margin(common.margin)?;
            let body = load_body(body)?;
            let n = body.dimension();
            let c = parse_point(center, n, "center")?;
            let points = eval.iter().map(|e| parse_point(e, n, "eval")).collect::<Result<Vec<_>>>()?;
            let rule = rule_for(n, common)?;
            let model = taylor_build(&body, &c, *order, &rule)?;
            let values = points.iter().map(|q| model.eval(q)).collect::<Result<Vec<_>>>()?;
            Ok(match common.format.unwrap_or(Format::Text) {
                Format::Json => json_text(json!({
                    "center": vec_json(&c),
                    "order": order,
                    "coefficients": model.coefficients().iter().map(|t| json!({"alpha": t.alpha.exponents(), "value": t.value})).collect::<Vec<_>>(),
                    "evaluations": points.iter().zip(&values).map(|(q, v)| json!({"point": vec_json(q), "value": v})).collect::<Vec<_>>(),
                })),
                Format::Csv => {
                    let mut s = format!("row,{},value\n", indexed("x", n).join(","));
                    for t in model.coefficients() {
                        let idx = t.alpha.exponents().iter().map(|a| a.to_string()).collect::<Vec<_>>().join(",");
                        let _ = writeln!(s, "coef,{idx},{}", num(t.value));
                    }
                    for (q, v) in points.iter().zip(&values) {
                        let _ = writeln!(s, "eval,{},{}", csv_row(q.iter().copied()), num(*v));
                    }
                    s
                }
                Format::Text => {
                    let mut s = format!("center: {:?}\norder: {order}\n", c.as_slice());
                    for t in model.coefficients() {
                        let _ = writeln!(s, "{:<16} {:.16e}", t.alpha.to_string(), t.value);
                    }
                    for (q, v) in points.iter().zip(&values) {
                        let _ = writeln!(s, "r({:?}) ≈ {v}", q.as_slice());
                    }
                    s
                }
            }
            .into())
        }
        Command::Balance { body, solver, common } => {
            check_margin(common.margin)?;
            let opts = balance_options(solver, common.margin)?;
            let body = load_body(body)?;
            let n = body.dimension();
            let rule = rule_for(n, common)?;
            let res = balancing_point(&body, &rule, &opts)?;
            let status = if res.converged { 0 } else { 4 };
            let text = match common.format.unwrap_or(Format::Text) {
                Format::Json => json_text(json!({
                    "point": vec_json(&res.point),
                    "converged": res.converged,
                    "iterations": res.iterations,
                    "grad_norm": res.grad_norm,
                    "beta_norm": res.beta_norm,
                    "area": res.area,
                    "hessian_eigenvalues": res.hessian_eigenvalues,
                    "trace": res.trace,
                })),
                Format::Csv => format!(
                    "{},beta_norm,grad_norm,area,iterations,converged,{}\n{},{},{},{},{},{},{}\n",
                    indexed("p", n).join(","),
                    indexed("hess_eig", n).join(","),
                    csv_row(res.point.iter().copied()),
                    num(res.beta_norm),
                    num(res.grad_norm),
                    num(res.area),
                    res.iterations,
                    res.converged,
                    csv_row(res.hessian_eigenvalues.iter().copied()),
                ),
                Format::Text => format!(
                    "point: {:?}\nconverged: {}\niterations: {}\n|grad r|: {:e}\n|beta|: {:e}\narea: {}\nhessian eigenvalues: {:?}\n",
                    res.point.as_slice(),
                    res.converged,
                    res.iterations,
                    res.grad_norm,
                    res.beta_norm,
                    res.area,
                    res.hessian_eigenvalues
                ),
            };
            if status != 0 {
                let err = FunkError::NotConverged {
                    iterations: res.iterations,
                    grad_norm: res.grad_norm,
                };
                return Ok(Output {
                    text,
                    status: err_status(&err),
                });
            }
            Ok(text.into())
        }
        Command::Scan {
            body,
            grid,
            direction,
            method,
            common,
        } => {
            check_margin(common.margin)?;
            let body = load_body(body)?;
            let n = body.dimension();
            let d = match direction {
                Some(text) => parse_point(text, n, "direction")?,
                None => {
                    let mut e = Vector::zeros(n);
                    e[n - 1] = 1.0;
                    e
                }
            };
            let steps = parse_grid(grid)?;
            let rule = rule_for(n, common)?;
            // Validate every point before computing anything.
            let contexts = steps
                .iter()
                .map(|&s| FunkContext::with_margin(&body, &d * s, common.margin))
                .collect::<Result<Vec<_>>>()?;
            let values: Vec<f64> = match method {
                AreaMethod::Projected => {
                    let samples = IndicatrixSamples::new(&body, &rule)?;
                    contexts.iter().map(|ctx| samples.area(ctx.base_point())).collect()
                }
                AreaMethod::Direct => contexts.iter().map(|ctx| area(ctx, &rule, *method)).collect::<Result<_>>()?,
            };
            Ok(match common.format.unwrap_or(Format::Csv) {
                Format::Json => json_text(json!({
                    "direction": vec_json(&d),
                    "method": method.to_string(),
                    "rows": steps.iter().zip(&contexts).zip(&values).map(|((s, ctx), r)| json!({"s": s, "point": vec_json(ctx.base_point()), "area": r})).collect::<Vec<_>>(),
                })),
                _ => {
                    let mut out = format!("s,{},area\n", indexed("p", n).join(","));
                    for ((s, ctx), r) in steps.iter().zip(&contexts).zip(&values) {
                        let _ = writeln!(out, "{},{},{}", num(*s), csv_row(ctx.base_point().iter().copied()), num(*r));
                    }
                    out
                }
            }
            .into())
        }
        Command::Field {
            field,
            solver,
            no_warm_start,
            common,
        } => {
            check_margin(common.margin)?;
            let opts = FieldOptions {
                balance: balance_options(solver, common.margin)?,
                warm_start: !no_warm_start,
            };
            let spec = FieldSpec::from_path(field)?;
            let n = spec.body_spec(&spec.coords(0))?.dimension;
            let rule = rule_for(n, common)?;
            let result = balanced_field(&spec, &rule, &opts)?;
            let m = spec.grid.len();
            let text = match common.format.unwrap_or(Format::Csv) {
                Format::Json => json_text(json!({
                    "points": result.points().iter().enumerate().map(|(i, p)| json!({
                        "q": p.coords,
                        "V": p.balancing.as_ref().map(vec_json),
                        "residual": p.residual,
                        "iterations": p.iterations,
                        "jacobian": result.jacobian(i).map(|j| (0..j.nrows()).map(|r| j.row(r).iter().copied().collect::<Vec<f64>>()).collect::<Vec<_>>()),
                        "error": p.error,
                    })).collect::<Vec<_>>(),
                    "failures": result.failures(),
                    "max_residual": result.max_residual(),
                })),
                _ => {
                    let mut out = format!("{},{},residual,iterations,status\n", indexed("q", m).join(","), indexed("V", n).join(","));
                    for p in result.points() {
                        let v = p.balancing.clone().unwrap_or_else(|| Vector::from_element(n, f64::NAN));
                        let _ = writeln!(
                            out,
                            "{},{},{},{},{}",
                            csv_row(p.coords.iter().copied()),
                            csv_row(v.iter().copied()),
                            num(p.residual.unwrap_or(f64::NAN)),
                            p.iterations,
                            if p.error.is_some() { "failed" } else { "ok" }
                        );
                    }
                    out
                }
            };
            let status = if result.failures() > 0 { 4 } else { 0 };
            Ok(Output { text, status })
        }
    }
}

fn err_status(e: &FunkError) -> i32 {
    match e {
        FunkError::Config(_)
        | FunkError::Json(_)
        | FunkError::Io(_)
        | FunkError::InvalidParameter(_)
        | FunkError::InvalidBody(_)
        | FunkError::DimensionMismatch { .. }
        | FunkError::UnsupportedDimension(_) => 2,
        FunkError::NotConverged { .. } | FunkError::RootFinding { .. } => 4,
        _ => 3,
    }
}

fn write_error(stderr: &mut dyn Write, kind: &str, message: &str) {
    let line = json!({ "error": kind, "message": message });
    let _ = writeln!(stderr, "{line}");
}

fn output_target(command: &Command) -> Option<&PathBuf> {
    match command {
        Command::Check { common, .. }
        | Command::Area { common, .. }
        | Command::Deriv { common, .. }
        | Command::Taylor { common, .. }
        | Command::Balance { common, .. }
        | Command::Scan { common, .. }
        | Command::Field { common, .. } => common.output.as_ref(),
    }
}

/// Parse `args` (including the program name), run, and return the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(stdout, "{}", e.render());
                return 0;
            }
            write_error(stderr, "usage", e.render().to_string().trim());
            return 2;
        }
    };
    let out = match execute(&cli.command) {
        Ok(out) => out,
        Err(e) => {
            write_error(stderr, e.kind(), &e.to_string());
            return err_status(&e);
        }
    };
    let written = match output_target(&cli.command) {
        Some(path) => std::fs::write(path, &out.text),
        None => stdout.write_all(out.text.as_bytes()),
    };
    if let Err(e) = written {
        write_error(stderr, "io", &e.to_string());
        return 2;
    }
    if out.status == 4 {
        let msg = match &cli.command {
            Command::Field { .. } => "one or more grid points failed",
            _ => "balancing did not converge",
        };
        write_error(stderr, "not_converged", msg);
    }
    out.status
}
