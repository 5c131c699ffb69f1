//! Detects solutions that leave their interval of definition before a
//! requested abscissa.
//!
//! A fixed-step integrator marches straight past a vertical asymptote: the
//! grid `x0 + k*h` never lands on an irrational blow-up point, and each step
//! only sees a finite tangent slope. Blow-up is therefore operationalized as
//! a *stable threshold escape*: the first grid point where `|y| >= M` is
//! recorded for a sequence of halving step sizes, and the crossings must
//! settle as `h -> 0`.

use crate::expr::EvalError;
use crate::format::{g17, json_num, json_opt};
use crate::ode::{Ivp, Method, OdeError, Stepper, Termination};
use rayon::prelude::*;
use serde_json::{json, Value};
use std::fmt::Write as _;
use thiserror::Error;

pub const DEFAULT_THRESHOLD: f64 = 1e8;
pub const DEFAULT_H0: f64 = 0.01;
pub const DEFAULT_LEVELS: usize = 8;
pub const DEFAULT_TOLERANCE: f64 = 0.05;

#[derive(Clone, Debug, PartialEq, Error)]
pub enum BlowupError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("step size {h} does not divide the distance {span} to the target")]
    NonDivisibleStep { h: f64, span: f64 },
    #[error(transparent)]
    Ode(#[from] OdeError),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BlowupConfig {
    /// Escape threshold `M`.
    pub threshold: f64,
    /// Coarsest step size; level `i` uses `h0 / 2^i`.
    pub h0: f64,
    pub levels: usize,
    /// Maximum accepted bracket width.
    pub tolerance: f64,
    /// Repeat the refinement with RK4 and demand the same verdict class.
    pub cross_check: bool,
}

impl Default for BlowupConfig {
    fn default() -> Self {
        BlowupConfig {
            threshold: DEFAULT_THRESHOLD,
            h0: DEFAULT_H0,
            levels: DEFAULT_LEVELS,
            tolerance: DEFAULT_TOLERANCE,
            cross_check: true,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Verdict {
    BlowupDetected {
        x_estimate: f64,
        bracket: (f64, f64),
    },
    BoundedOnInterval {
        x_end: f64,
        max_abs_y: f64,
    },
    Inconclusive {
        reason: String,
    },
}

impl Verdict {
    pub fn name(&self) -> &'static str {
        match self {
            Verdict::BlowupDetected { .. } => "BlowupDetected",
            Verdict::BoundedOnInterval { .. } => "BoundedOnInterval",
            Verdict::Inconclusive { .. } => "Inconclusive",
        }
    }
}

/// Result of one refinement level.
#[derive(Clone, Debug, PartialEq)]
pub struct Evidence {
    pub h: f64,
    pub crossing_x: Option<f64>,
    pub y_at_target: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BlowupReport {
    pub verdict: Verdict,
    /// Euler runs ordered by strictly decreasing `h`.
    pub evidence: Vec<Evidence>,
    pub tolerance: f64,
}

impl BlowupReport {
    pub fn to_json(&self) -> Value {
        let (x_estimate, bracket) = match &self.verdict {
            Verdict::BlowupDetected {
                x_estimate,
                bracket: (lo, hi),
            } => (json_num(*x_estimate), json!([json_num(*lo), json_num(*hi)])),
            _ => (Value::Null, Value::Null),
        };
        let mut obj = serde_json::Map::new();
        obj.insert("verdict".into(), self.verdict.name().into());
        obj.insert("x_estimate".into(), x_estimate);
        obj.insert("bracket".into(), bracket);
        match &self.verdict {
            Verdict::BoundedOnInterval { x_end, max_abs_y } => {
                obj.insert("x_end".into(), json_num(*x_end));
                obj.insert("max_abs_y".into(), json_num(*max_abs_y));
            }
            Verdict::Inconclusive { reason } => {
                obj.insert("reason".into(), reason.clone().into());
            }
            Verdict::BlowupDetected { .. } => {}
        }
        obj.insert("tolerance".into(), json_num(self.tolerance));
        let evidence = self
            .evidence
            .iter()
            .map(|e| {
                json!({
                    "h": json_num(e.h),
                    "crossing_x": json_opt(e.crossing_x),
                    "y_at_target": json_opt(e.y_at_target),
                })
            })
            .collect();
        obj.insert("evidence".into(), Value::Array(evidence));
        Value::Object(obj)
    }

    /// Evidence table as CSV: `h,crossing_x,y_at_target` (empty cell for none).
    pub fn evidence_csv(&self) -> String {
        let cell = |v: Option<f64>| v.map(g17).unwrap_or_default();
        let mut out = String::from("h,crossing_x,y_at_target\n");
        for e in &self.evidence {
            let _ = writeln!(
                out,
                "{},{},{}",
                g17(e.h),
                cell(e.crossing_x),
                cell(e.y_at_target)
            );
        }
        out
    }
}

struct Scan {
    crossing: Option<f64>,
    /// `y` at the last grid point not beyond `x_max`, when no crossing occurred.
    y_at_target: Option<f64>,
    x_reached: f64,
    max_abs_y: f64,
}

fn steps_to(span: f64, h: f64) -> usize {
    (span / h * (1.0 + 1e-12)).floor() as usize
}

fn check_scan_args(ivp: &Ivp, h: f64, x_max: f64, m: f64) -> Result<(), BlowupError> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(BlowupError::InvalidArgument(format!(
            "step size must be positive, got {h}"
        )));
    }
    if !(m > 0.0) {
        return Err(BlowupError::InvalidArgument(format!(
            "threshold must be positive, got {m}"
        )));
    }
    if !(x_max > ivp.x0()) || !x_max.is_finite() {
        return Err(BlowupError::InvalidArgument(format!(
            "x_max {x_max} must exceed x0 {}",
            ivp.x0()
        )));
    }
    Ok(())
}

fn scan(ivp: &Ivp, h: f64, x_max: f64, m: f64, method: Method) -> Result<Scan, BlowupError> {
    check_scan_args(ivp, h, x_max, m)?;
    let n = steps_to(x_max - ivp.x0(), h);
    let mut last = (ivp.x0(), ivp.y0());
    let mut max_abs_y = 0.0f64;
    for item in Stepper::new(ivp, h, method)?.take(n + 1) {
        match item {
            Ok(p) => {
                last = (p.x, p.y);
                max_abs_y = max_abs_y.max(p.y.abs());
                if p.y.abs() >= m {
                    return Ok(Scan {
                        crossing: Some(p.x),
                        y_at_target: None,
                        x_reached: p.x,
                        max_abs_y,
                    });
                }
            }
            // the run cannot continue past this grid point; count it as the escape
            Err(Termination::Overflow) | Err(Termination::Domain(_)) => {
                return Ok(Scan {
                    crossing: Some(last.0),
                    y_at_target: None,
                    x_reached: last.0,
                    max_abs_y,
                });
            }
        }
    }
    Ok(Scan {
        crossing: None,
        y_at_target: Some(last.1),
        x_reached: last.0,
        max_abs_y,
    })
}

/// Smallest Euler grid abscissa `x_k <= x_max` with `|y_k| >= m`.
pub fn threshold_crossing(
    ivp: &Ivp,
    h: f64,
    x_max: f64,
    m: f64,
) -> Result<Option<f64>, BlowupError> {
    Ok(scan(ivp, h, x_max, m, Method::Euler)?.crossing)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Class {
    AllCross,
    NoneCross,
    Mixed,
}

fn class_of(scans: &[Scan]) -> Class {
    let crossed = scans.iter().filter(|s| s.crossing.is_some()).count();
    if crossed == scans.len() {
        Class::AllCross
    } else if crossed == 0 {
        Class::NoneCross
    } else {
        Class::Mixed
    }
}

fn refine(
    ivp: &Ivp,
    x_max: f64,
    cfg: &BlowupConfig,
    method: Method,
) -> Result<Vec<Scan>, BlowupError> {
    (0..cfg.levels)
        .into_par_iter()
        .map(|i| {
            scan(
                ivp,
                cfg.h0 / 2f64.powi(i as i32),
                x_max,
                cfg.threshold,
                method,
            )
        })
        .collect()
}

/// Runs the halving refinement and classifies the outcome.
pub fn estimate_blowup(ivp: &Ivp, x_max: f64, cfg: &BlowupConfig) -> BlowupReport {
    let inconclusive = |reason: String, evidence: Vec<Evidence>| BlowupReport {
        verdict: Verdict::Inconclusive { reason },
        evidence,
        tolerance: cfg.tolerance,
    };
    if cfg.levels < 3 {
        return inconclusive(
            format!("at least 3 refinement levels required, got {}", cfg.levels),
            vec![],
        );
    }
    if !(cfg.h0 / 2f64.powi(cfg.levels as i32 - 1) > 0.0) {
        return inconclusive("finest step size underflows".into(), vec![]);
    }
    let scans = match refine(ivp, x_max, cfg, Method::Euler) {
        Ok(s) => s,
        Err(e) => return inconclusive(e.to_string(), vec![]),
    };
    let evidence: Vec<Evidence> = scans
        .iter()
        .enumerate()
        .map(|(i, s)| Evidence {
            h: cfg.h0 / 2f64.powi(i as i32),
            crossing_x: s.crossing,
            y_at_target: s.y_at_target,
        })
        .collect();

    let class = class_of(&scans);
    let verdict = match class {
        Class::Mixed => {
            return inconclusive(
                "threshold crossed at some refinement levels but not others".into(),
                evidence,
            )
        }
        Class::NoneCross => {
            let finest = scans.last().expect("levels >= 3");
            Verdict::BoundedOnInterval {
                x_end: finest.x_reached,
                max_abs_y: finest.max_abs_y,
            }
        }
        Class::AllCross => {
            let xs: Vec<f64> = scans.iter().filter_map(|s| s.crossing).collect();
            let gaps: Vec<f64> = xs.windows(2).map(|w| w[1] - w[0]).collect();
            if gaps.windows(2).any(|g| g[1].abs() > g[0].abs()) {
                return inconclusive(
                    "crossing abscissas do not settle under refinement".into(),
                    evidence,
                );
            }
            let last = xs[xs.len() - 1];
            let step = gaps[gaps.len() - 1];
            // First-order convergence: the remaining tail is about one more gap.
            // The bracket reaches two gaps out to absorb the grid quantization of
            // the crossings.
            let x_estimate = last + step;
            let far = last + 2.0 * step;
            let bracket = (last.min(far), last.max(far));
            let width = bracket.1 - bracket.0;
            if width > cfg.tolerance {
                return inconclusive(
                    format!(
                        "bracket width {} exceeds tolerance {}",
                        g17(width),
                        g17(cfg.tolerance)
                    ),
                    evidence,
                );
            }
            Verdict::BlowupDetected {
                x_estimate,
                bracket,
            }
        }
    };

    if cfg.cross_check {
        match refine(ivp, x_max, cfg, Method::Rk4) {
            Ok(rk) if class_of(&rk) == class => {}
            Ok(_) => return inconclusive("Euler and RK4 refinements disagree".into(), evidence),
            Err(e) => return inconclusive(format!("RK4 cross-check failed: {e}"), evidence),
        }
    }

    BlowupReport {
        verdict,
        evidence,
        tolerance: cfg.tolerance,
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Estimate {
    Value(f64),
    /// The run stopped before reaching the target.
    Escaped {
        at_x: f64,
        reason: String,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub struct VariabilityRow {
    pub h: f64,
    pub steps: usize,
    pub estimate: Estimate,
}

/// Euler estimates of `y(x_target)` for each step size.
pub fn variability_table(
    ivp: &Ivp,
    x_target: f64,
    step_sizes: &[f64],
) -> Result<Vec<VariabilityRow>, BlowupError> {
    let span = x_target - ivp.x0();
    if !(span > 0.0) || !span.is_finite() {
        return Err(BlowupError::InvalidArgument(format!(
            "target {x_target} must exceed x0 {}",
            ivp.x0()
        )));
    }
    let mut plan = Vec::with_capacity(step_sizes.len());
    for &h in step_sizes {
        if !(h > 0.0 && h.is_finite()) {
            return Err(BlowupError::InvalidArgument(format!(
                "step size must be positive, got {h}"
            )));
        }
        let n = (span / h).round();
        if n < 1.0 || (n * h - span).abs() > 1e-12 * span.abs() {
            return Err(BlowupError::NonDivisibleStep { h, span });
        }
        plan.push((h, n as usize));
    }
    plan.into_iter()
        .map(|(h, n)| {
            let traj = crate::ode::integrate_euler(ivp, h, n)?;
            let estimate = match &traj.termination {
                None => Estimate::Value(traj.last().y),
                Some(t) => Estimate::Escaped {
                    at_x: traj.last().x,
                    reason: match t {
                        Termination::Overflow => "overflow".to_string(),
                        Termination::Domain(e) => domain_reason(e),
                    },
                },
            };
            Ok(VariabilityRow {
                h,
                steps: n,
                estimate,
            })
        })
        .collect()
}

fn domain_reason(e: &EvalError) -> String {
    format!("undefined slope: {e}")
}

pub fn variability_csv(rows: &[VariabilityRow], round: Option<usize>) -> String {
    let mut out = String::from("h,steps,y_target,status\n");
    for r in rows {
        let (value, status) = match &r.estimate {
            Estimate::Value(v) => (crate::format::fixed(*v, round), "ok".to_string()),
            Estimate::Escaped { at_x, .. } => {
                (String::new(), format!("escaped at x={}", g17(*at_x)))
            }
        };
        let _ = writeln!(out, "{},{},{},{}", g17(r.h), r.steps, value, status);
    }
    out
}

pub fn variability_json(rows: &[VariabilityRow]) -> Value {
    Value::Array(
        rows.iter()
            .map(|r| match &r.estimate {
                Estimate::Value(v) => json!({"h": json_num(r.h), "steps": r.steps, "y_target": json_num(*v), "escaped": false}),
                Estimate::Escaped { at_x, reason } => json!({
                    "h": json_num(r.h), "steps": r.steps, "y_target": null,
                    "escaped": true, "at_x": json_num(*at_x), "reason": reason,
                }),
            })
            .collect(),
    )
}
