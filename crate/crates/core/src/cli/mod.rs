//! Command-line front end.
//!
//! Exit status: 0 success, 1 usage or flag error, 2 expression parse error,
//! 3 numerical diagnostic failure. Output is rendered completely before
//! anything is written, and `--out` files are replaced atomically, so a
//! failing run leaves no partial output behind.

mod args;
mod config;

use crate::blowup::{self, BlowupConfig, Estimate, Verdict};
use crate::cooling::{self, CoolingError, CoolingObservations};
use crate::expr::{Expression, ParseError};
use crate::format::{fixed, json_num};
use crate::limits::{self, LimitVerdict, Trajectory2D};
use crate::ode::{self, Ivp, Method};
use crate::recurrence::{self, RecurrenceInstance};
use args::{Cli, Command, CoolingCommand, Format, MethodArg};
use clap::Parser;
use serde_json::{json, Value};
use std::io::Write;
use std::path::Path;
use std::sync::Once;

/// Caps internal parallelism; `0` or unset means one thread per core.
pub const THREADS_ENV: &str = "ILLPOSED_THREADS";

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Parse {
        flag: &'static str,
        source: String,
        error: ParseError,
    },
    Diagnostic(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Parse { .. } => 2,
            CliError::Diagnostic(_) => 3,
        }
    }

    fn message(&self) -> String {
        match self {
            CliError::Usage(m) => format!("error: {m}"),
            CliError::Parse {
                flag,
                source,
                error,
            } => {
                let caret = " ".repeat(error.offset().min(source.len()));
                format!("error: cannot parse --{flag}: {error}\n  {source}\n  {caret}^")
            }
            CliError::Diagnostic(m) => format!("diagnostic failure: {m}"),
        }
    }
}

fn usage(e: impl std::fmt::Display) -> CliError {
    CliError::Usage(e.to_string())
}

fn expr(flag: &'static str, source: &str) -> Result<Expression, CliError> {
    Expression::parse(source).map_err(|error| CliError::Parse {
        flag,
        source: source.to_string(),
        error,
    })
}

/// Rendered payload plus optional notes for standard error.
struct Rendered {
    body: String,
    notes: Vec<String>,
}

impl Rendered {
    fn new(body: String) -> Self {
        Rendered {
            body,
            notes: vec![],
        }
    }

    fn json(value: Value) -> Self {
        let mut body = serde_json::to_string_pretty(&value).expect("serializable");
        body.push('\n');
        Rendered::new(body)
    }

    fn note(mut self, note: impl Into<String>) -> Self {
        self.notes.push(note.into());
        self
    }
}

fn configure_threads() {
    static INIT: Once = Once::new();
    INIT.call_once(|| {
        let n = std::env::var(THREADS_ENV)
            .ok()
            .and_then(|v| v.trim().parse::<usize>().ok())
            .unwrap_or(0);
        if n > 0 {
            // fails only if a pool was already installed, which keeps its own size
            let _ = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build_global();
        }
    });
}

/// Runs one invocation; `argv[0]` is the program name.
pub fn run(argv: &[String], stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32 {
    configure_threads();
    let argv = match config::expand(argv) {
        Ok(a) => a,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            return 1;
        }
    };
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(stderr, "{text}");
                1
            } else {
                let _ = write!(stdout, "{text}");
                0
            };
        }
    };
    match execute(&cli) {
        Ok(rendered) => {
            for note in &rendered.notes {
                let _ = writeln!(stderr, "{note}");
            }
            match emit(cli.out.as_deref(), &rendered.body, stdout) {
                Ok(()) => 0,
                Err(e) => {
                    let _ = writeln!(stderr, "error: {e}");
                    1
                }
            }
        }
        Err(e) => {
            let _ = writeln!(stderr, "{}", e.message());
            e.exit_code()
        }
    }
}

fn emit(out: Option<&Path>, body: &str, stdout: &mut dyn Write) -> std::io::Result<()> {
    match out {
        None => {
            stdout.write_all(body.as_bytes())?;
            stdout.flush()
        }
        Some(path) => {
            let dir = match path.parent() {
                Some(p) if !p.as_os_str().is_empty() => p,
                _ => Path::new("."),
            };
            let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
            tmp.write_all(body.as_bytes())?;
            tmp.flush()?;
            tmp.persist(path).map_err(|e| e.error)?;
            Ok(())
        }
    }
}

fn execute(cli: &Cli) -> Result<Rendered, CliError> {
    let fmt = |default: Format| cli.format.unwrap_or(default);
    match &cli.command {
        Command::Euler(a) => {
            let ivp = Ivp::new(expr("rhs", &a.rhs)?, a.x0, a.y0).map_err(usage)?;
            let method = match a.method {
                MethodArg::Euler => Method::Euler,
                MethodArg::Rk4 => Method::Rk4,
            };
            let traj = ode::integrate(&ivp, a.h, a.steps, method).map_err(usage)?;
            if cli.strict && traj.terminated_early() {
                return Err(CliError::Diagnostic(format!(
                    "integration stopped at n={} ({:?})",
                    traj.last().k,
                    traj.termination
                )));
            }
            let mut out = match fmt(Format::Csv) {
                Format::Csv => Rendered::new(traj.to_csv(cli.round)),
                Format::Json => Rendered::json(json!({
                    "h": json_num(traj.h),
                    "method": if method == Method::Euler { "euler" } else { "rk4" },
                    "terminated_early": traj.terminated_early(),
                    "points": traj.points.iter().map(|p| json!({
                        "n": p.k, "x_n": json_num(p.x), "y_n": json_num(p.y),
                    })).collect::<Vec<_>>(),
                })),
            };
            if let Some(t) = &traj.termination {
                out = out.note(format!(
                    "note: integration stopped early after n={}: {t:?}",
                    traj.last().k
                ));
            }
            Ok(out)
        }
        Command::Blowup(a) => {
            let ivp = Ivp::new(expr("rhs", &a.rhs)?, a.x0, a.y0).map_err(usage)?;
            if !(a.xmax > a.x0) {
                return Err(usage("--xmax must exceed --x0"));
            }
            if !(a.threshold > 0.0) || !(a.h0 > 0.0) || !(a.tolerance > 0.0) {
                return Err(usage("--threshold, --h0 and --tolerance must be positive"));
            }
            if a.levels < 3 {
                return Err(usage("--levels must be at least 3"));
            }
            let cfg = BlowupConfig {
                threshold: a.threshold,
                h0: a.h0,
                levels: a.levels,
                tolerance: a.tolerance,
                cross_check: !a.no_cross_check,
            };
            let report = blowup::estimate_blowup(&ivp, a.xmax, &cfg);
            if let (true, Verdict::Inconclusive { reason }) = (cli.strict, &report.verdict) {
                return Err(CliError::Diagnostic(format!(
                    "blow-up diagnosis inconclusive: {reason}"
                )));
            }
            Ok(match fmt(Format::Json) {
                Format::Json => Rendered::json(report.to_json()),
                Format::Csv => Rendered::new(report.evidence_csv())
                    .note(format!("verdict: {}", report.verdict.name())),
            })
        }
        Command::Variability(a) => {
            let ivp = Ivp::new(expr("rhs", &a.rhs)?, a.x0, a.y0).map_err(usage)?;
            let rows = blowup::variability_table(&ivp, a.target, &a.h).map_err(usage)?;
            let mut out = match fmt(Format::Csv) {
                Format::Csv => Rendered::new(blowup::variability_csv(&rows, cli.round)),
                Format::Json => Rendered::json(blowup::variability_json(&rows)),
            };
            for r in &rows {
                if let Estimate::Escaped { at_x, reason } = &r.estimate {
                    out = out.note(format!("note: h={} stopped at x={at_x}: {reason}", r.h));
                }
            }
            Ok(out)
        }
        Command::Cooling(CoolingCommand::Fit(a)) => {
            let [t0, t1, t2] = a.temps[..] else {
                return Err(usage(format!(
                    "--temps needs 3 readings, got {}",
                    a.temps.len()
                )));
            };
            let obs = CoolingObservations::new(a.t1, t0, t1, t2).map_err(usage)?;
            let fit = cooling::fit_three_point(&obs, a.floor);
            Ok(match fmt(Format::Json) {
                Format::Json => Rendered::json(fit.to_json()),
                Format::Csv => {
                    let cell = |v: Option<f64>| v.map(|v| fixed(v, cli.round)).unwrap_or_default();
                    let r = fit.residuals();
                    Rendered::new(format!(
                        "T_M,k,verdict,r0,r1,r2\n{},{},{},{},{},{}\n",
                        cell(fit.params.map(|p| p.t_m)),
                        cell(fit.params.map(|p| p.k)),
                        fit.verdict.name(),
                        cell(r.map(|r| r[0])),
                        cell(r.map(|r| r[1])),
                        cell(r.map(|r| r[2])),
                    ))
                }
            })
        }
        Command::Cooling(CoolingCommand::Range(a)) => {
            let [t0, t2] = a.temps[..] else {
                return Err(usage(format!(
                    "--temps needs 2 readings, got {}",
                    a.temps.len()
                )));
            };
            let range = cooling::feasible_midpoint_range(t0, t2, a.floor).map_err(|e| match e {
                CoolingError::NoRoot { .. } => CliError::Diagnostic(e.to_string()),
                other => usage(other),
            })?;
            let sweep = match a.sweep {
                Some(n) => {
                    let grid = cooling::sweep_grid(t0, t2, n);
                    Some(cooling::midpoint_sweep(a.t1, t0, t2, a.floor, &grid).map_err(usage)?)
                }
                None => None,
            };
            match fmt(Format::Json) {
                Format::Json => {
                    let mut v = range.to_json(t0, t2, a.floor);
                    if let Some(rows) = &sweep {
                        v["sweep"] = cooling::sweep_json(rows);
                    }
                    Ok(Rendered::json(v))
                }
                Format::Csv => match &sweep {
                    Some(rows) => Ok(Rendered::new(cooling::sweep_csv(rows))),
                    None => Err(usage(
                        "CSV output of `cooling range` is the c-sweep; pass --sweep N",
                    )),
                },
            }
        }
        Command::Recurrence(a) => {
            let inst = RecurrenceInstance::new(a.a, a.b);
            if !a.a.is_finite() || !a.b.is_finite() {
                return Err(usage("initial values must be finite"));
            }
            if !(a.tol > 0.0) {
                return Err(usage("--tol must be positive"));
            }
            let seq = recurrence::iterate_recurrence(inst, a.n);
            let settled = recurrence::detect_limit(&seq, a.tol);
            if cli.strict && settled.is_none() {
                return Err(CliError::Diagnostic(format!(
                    "sequence did not settle within tolerance {} after {} terms",
                    a.tol, a.n
                )));
            }
            Ok(match fmt(Format::Csv) {
                Format::Csv => {
                    let note = match settled {
                        Some(s) => format!(
                            "limit {} (settled at n={})",
                            fixed(s.limit, None),
                            s.settled_at
                        ),
                        None => "limit not detected".to_string(),
                    };
                    Rendered::new(recurrence::sequence_csv(&seq, cli.round)).note(note)
                }
                Format::Json => Rendered::json(json!({
                    "a": json_num(a.a),
                    "b": json_num(a.b),
                    "sequence": seq.iter().map(|x| json_num(*x)).collect::<Vec<_>>(),
                    "limit": settled.map_or(Value::Null, |s| json_num(s.limit)),
                    "settled_at": settled.map(|s| s.settled_at),
                    "closed_form_limit": json_num(inst.limit()),
                })),
            })
        }
        Command::Limit(a) => {
            let f = expr("f", &a.f)?;
            let mut trajs = Vec::new();
            for group in &a.trajectory {
                for item in group.split(';').filter(|s| !s.trim().is_empty()) {
                    trajs.push(parse_trajectory(item)?);
                }
            }
            for &level in &a.level_curve {
                trajs.push(limits::level_curve_trajectory(level).map_err(usage)?);
            }
            if a.default_set {
                trajs.extend(limits::default_trajectories());
            }
            let schedule = a.schedule.clone().unwrap_or_else(limits::default_schedule);
            if a.points {
                let [traj] = &trajs[..] else {
                    return Err(usage(format!(
                        "--points needs exactly one trajectory, got {}",
                        trajs.len()
                    )));
                };
                return Ok(Rendered::new(limits::samples_csv(
                    &limits::trajectory_samples(&f, traj, &schedule),
                )));
            }
            let report = limits::compare_trajectories(&f, &trajs, &schedule).map_err(usage)?;
            if let (true, LimitVerdict::Inconclusive(reason)) = (cli.strict, &report.verdict) {
                return Err(CliError::Diagnostic(format!(
                    "limit comparison inconclusive: {reason}"
                )));
            }
            Ok(match fmt(Format::Json) {
                Format::Json => Rendered::json(report.to_json()),
                Format::Csv => Rendered::new(report.to_csv())
                    .note(format!("verdict: {}", report.verdict.name())),
            })
        }
        Command::PolarScan(a) => {
            let f = expr("f", &a.f)?;
            let radii = a.radii.clone().unwrap_or_else(limits::default_radii);
            let scan = limits::angular_bound_scan(&f, &radii, a.angles).map_err(usage)?;
            Ok(match fmt(Format::Csv) {
                Format::Csv => {
                    Rendered::new(scan.to_csv()).note(format!("bounded: {}", scan.bounded))
                }
                Format::Json => Rendered::json(scan.to_json()),
            })
        }
        Command::ImplicitScan(a) => {
            let f = expr("F", &a.f)?;
            let cells = limits::implicit_zero_scan(&f, a.radius, a.grid).map_err(usage)?;
            Ok(match fmt(Format::Csv) {
                Format::Csv => Rendered::new(limits::cells_csv(&cells))
                    .note(format!("{} cells flagged", cells.len())),
                Format::Json => Rendered::json(json!({
                    "radius": json_num(a.radius),
                    "grid": a.grid,
                    "count": cells.len(),
                    "cells": cells.iter().map(|c| json!({"cell_x": json_num(c.x), "cell_y": json_num(c.y)})).collect::<Vec<_>>(),
                })),
            })
        }
    }
}

fn parse_trajectory(item: &str) -> Result<Trajectory2D, CliError> {
    let Some((x, y)) = item.split_once(',') else {
        return Err(usage(format!("trajectory `{item}` must be X_EXPR,Y_EXPR")));
    };
    let xe = expr("trajectory", x)?;
    let ye = expr("trajectory", y)?;
    Trajectory2D::new(xe, ye, format!("({}, {})", x.trim(), y.trim())).map_err(usage)
}
