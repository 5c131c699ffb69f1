//! Numerical probes for two-variable limits at the origin.
//!
//! * [`limit_along`] / [`compare_trajectories`]: path limits. Two paths with
//!   different limits prove non-existence; agreement proves nothing.
//! * [`angular_bound_scan`]: in polar form `f = r * g(alpha)` the conclusion
//!   "the limit is 0 because r -> 0" needs `g` bounded. The scan estimates
//!   `max |f| / r` on circles of shrinking radius.
//! * [`implicit_zero_scan`]: sign-change cells of `F(x, y) = 0` near the
//!   origin, to tell a level *curve* through the origin from an isolated point.

use crate::expr::{EvalError, Expression};
use crate::format::{g17, json_num};
use rayon::prelude::*;
use serde_json::{json, Value};
use std::f64::consts::TAU;
use std::fmt::Write as _;
use thiserror::Error;

/// Successive path values must differ by less than this to count as converged.
pub const CAUCHY_TOLERANCE: f64 = 1e-6;
/// Path values beyond this magnitude flag divergence.
pub const DIVERGENCE_BOUND: f64 = 1e12;
/// Two converged path limits further apart than this witness non-existence.
pub const COMPARISON_TOLERANCE: f64 = 1e-4;
/// `max |f| / r` at or above this counts as an unbounded angular factor.
pub const ANGULAR_CAP: f64 = 1e6;
/// Corner values below this magnitude count as zeros.
pub const ZERO_EPS: f64 = 1e-14;

const ZOOM_ROUNDS: usize = 16;
const ZOOM_SAMPLES: usize = 16;
const ZOOM_SEEDS: usize = 3;

#[derive(Clone, Debug, PartialEq, Error)]
pub enum LimitError {
    #[error("`{expr}` may only use {allowed}, found `{found}`")]
    ForeignVariable {
        expr: String,
        allowed: &'static str,
        found: String,
    },
    #[error("trajectory `{0}` does not approach the origin")]
    NotApproachingOrigin(String),
    #[error("level-curve parameter must be nonzero")]
    ZeroLevel,
    #[error("invalid schedule: {0}")]
    BadSchedule(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

fn require_vars(e: &Expression, allowed: &[&str], label: &'static str) -> Result<(), LimitError> {
    match e
        .free_variables()
        .into_iter()
        .find(|v| !allowed.contains(&v.as_str()))
    {
        None => Ok(()),
        Some(found) => Err(LimitError::ForeignVariable {
            expr: e.to_string(),
            allowed: label,
            found,
        }),
    }
}

/// A parametric path `(x(t), y(t))` reaching the origin as `t -> 0+`.
#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory2D {
    x_of_t: Expression,
    y_of_t: Expression,
    label: String,
}

impl Trajectory2D {
    pub fn new(
        x_of_t: Expression,
        y_of_t: Expression,
        label: impl Into<String>,
    ) -> Result<Self, LimitError> {
        require_vars(&x_of_t, &["t"], "t")?;
        require_vars(&y_of_t, &["t"], "t")?;
        let traj = Trajectory2D {
            x_of_t,
            y_of_t,
            label: label.into(),
        };
        let norm = |t: f64| traj.point(t).ok().map(|(x, y)| x.hypot(y));
        let approaching = match (norm(1e-1), norm(1e-3), norm(1e-6)) {
            (far, Some(mid), Some(near)) => {
                near < mid && near < 1e-2 && far.is_none_or(|f| mid < f)
            }
            _ => false,
        };
        if !approaching {
            return Err(LimitError::NotApproachingOrigin(traj.label));
        }
        Ok(traj)
    }

    /// Parses `x(t)` and `y(t)`; the label defaults to `(x, y)`.
    pub fn parse(x_src: &str, y_src: &str) -> Result<Self, TrajectoryParseError> {
        let x = x_src.parse()?;
        let y = y_src.parse()?;
        Ok(Trajectory2D::new(
            x,
            y,
            format!("({}, {})", x_src.trim(), y_src.trim()),
        )?)
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn point(&self, t: f64) -> Result<(f64, f64), EvalError> {
        let b = [("t", t)];
        Ok((self.x_of_t.evaluate(&b)?, self.y_of_t.evaluate(&b)?))
    }
}

#[derive(Debug, Error)]
pub enum TrajectoryParseError {
    #[error(transparent)]
    Parse(#[from] crate::expr::ParseError),
    #[error(transparent)]
    Limit(#[from] LimitError),
}

/// The level curve `xy/(x+y) = a`, i.e. `x = t`, `y = a t / (t - a)`.
pub fn level_curve_trajectory(a: f64) -> Result<Trajectory2D, LimitError> {
    if a == 0.0 || !a.is_finite() {
        return Err(LimitError::ZeroLevel);
    }
    let x = Expression::parse("t").expect("static");
    let y = Expression::parse(&format!("({a:?})*t/(t-({a:?}))")).expect("literal round-trips");
    Trajectory2D::new(x, y, format!("level a={}", g17(a)))
}

fn path(x: &str, y: &str, label: &str) -> Trajectory2D {
    Trajectory2D::new(
        x.parse().expect("static"),
        y.parse().expect("static"),
        label,
    )
    .expect("static path")
}

/// Lines, a parabola, a square-root branch and both axes.
pub fn default_trajectories() -> Vec<Trajectory2D> {
    vec![
        path("t", "t", "y=x"),
        path("t", "-t", "y=-x"),
        path("t", "t^2", "y=x^2"),
        path("t", "sqrt(abs(t))", "y=sqrt(x)"),
        path("0", "t", "x=0"),
        path("t", "0", "y=0"),
    ]
}

/// `t = 0.1 / 2^k` for `k = 0..=24`, ending near 6e-9.
///
/// Going much lower costs accuracy: on a level curve of `xy/(x+y)` the sum
/// `x + y` cancels to `O(t^2)` and the rounding error grows like `eps |a| / t`.
pub fn default_schedule() -> Vec<f64> {
    (0..=24).map(|k| 0.1 / 2f64.powi(k)).collect()
}

fn check_schedule(ts: &[f64]) -> Result<(), LimitError> {
    if ts.len() < 4 {
        return Err(LimitError::BadSchedule(format!(
            "need at least 4 points, got {}",
            ts.len()
        )));
    }
    if ts.iter().any(|t| !(*t > 0.0) || !t.is_finite()) {
        return Err(LimitError::BadSchedule("points must be positive".into()));
    }
    if ts.windows(2).any(|w| w[1] >= w[0]) {
        return Err(LimitError::BadSchedule(
            "points must be strictly decreasing".into(),
        ));
    }
    if ts[ts.len() - 1] >= 1e-8 {
        return Err(LimitError::BadSchedule(
            "last point must be below 1e-8".into(),
        ));
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum PathLimit {
    Converged(f64),
    Diverged,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PathOutcome {
    pub label: String,
    pub limit: PathLimit,
    /// Samples where `f` or the path was undefined: `(t, message)`.
    pub skipped: Vec<(f64, String)>,
}

impl PathOutcome {
    pub fn converged(&self) -> Option<f64> {
        match self.limit {
            PathLimit::Converged(v) => Some(v),
            _ => None,
        }
    }
}

fn sample(f: &Expression, traj: &Trajectory2D, t: f64) -> Result<(f64, f64, f64), EvalError> {
    let (x, y) = traj.point(t)?;
    Ok((x, y, f.evaluate(&[("x", x), ("y", y)])?))
}

pub fn limit_along(
    f: &Expression,
    traj: &Trajectory2D,
    schedule: &[f64],
) -> Result<PathOutcome, LimitError> {
    require_vars(f, &["x", "y"], "x and y")?;
    check_schedule(schedule)?;
    let mut values = Vec::with_capacity(schedule.len());
    let mut skipped = Vec::new();
    for &t in schedule {
        match sample(f, traj, t) {
            Ok((_, _, v)) => values.push(v),
            Err(e) => skipped.push((t, e.to_string())),
        }
    }
    let limit = if values.iter().any(|v| v.abs() > DIVERGENCE_BOUND) {
        PathLimit::Diverged
    } else if values.len() >= 3
        && values[values.len() - 3..]
            .windows(2)
            .all(|w| (w[1] - w[0]).abs() < CAUCHY_TOLERANCE)
    {
        PathLimit::Converged(values[values.len() - 1])
    } else {
        PathLimit::Inconclusive
    };
    Ok(PathOutcome {
        label: traj.label.clone(),
        limit,
        skipped,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub enum LimitVerdict {
    DoesNotExist {
        first: (String, f64),
        second: (String, f64),
    },
    /// Every path converged to the same value. Evidence only, not a proof.
    ConsistentValue(f64),
    Inconclusive(String),
}

impl LimitVerdict {
    pub fn name(&self) -> &'static str {
        match self {
            LimitVerdict::DoesNotExist { .. } => "DoesNotExist",
            LimitVerdict::ConsistentValue(_) => "ConsistentValue",
            LimitVerdict::Inconclusive(_) => "Inconclusive",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LimitReport {
    pub paths: Vec<PathOutcome>,
    pub verdict: LimitVerdict,
}

impl LimitReport {
    pub fn to_json(&self) -> Value {
        let paths: Vec<Value> = self
            .paths
            .iter()
            .map(|p| {
                let (status, limit) = match p.limit {
                    PathLimit::Converged(v) => ("converged", json_num(v)),
                    PathLimit::Diverged => ("diverged", Value::Null),
                    PathLimit::Inconclusive => ("inconclusive", Value::Null),
                };
                json!({
                    "label": p.label,
                    "status": status,
                    "limit": limit,
                    "skipped": p.skipped.iter().map(|(t, why)| json!({"t": json_num(*t), "reason": why})).collect::<Vec<_>>(),
                })
            })
            .collect();
        let mut obj = serde_json::Map::new();
        obj.insert("verdict".into(), self.verdict.name().into());
        match &self.verdict {
            LimitVerdict::DoesNotExist { first, second } => {
                obj.insert(
                    "witness".into(),
                    json!([
                        {"label": first.0, "limit": json_num(first.1)},
                        {"label": second.0, "limit": json_num(second.1)},
                    ]),
                );
            }
            LimitVerdict::ConsistentValue(v) => {
                obj.insert("value".into(), json_num(*v));
                obj.insert("conclusive".into(), false.into());
                obj.insert(
                    "note".into(),
                    "agreement along finitely many paths does not prove the limit exists".into(),
                );
            }
            LimitVerdict::Inconclusive(reason) => {
                obj.insert("reason".into(), reason.clone().into());
            }
        }
        obj.insert("trajectories".into(), Value::Array(paths));
        Value::Object(obj)
    }

    /// `label,status,limit` rows.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("label,status,limit\n");
        for p in &self.paths {
            let (status, limit) = match p.limit {
                PathLimit::Converged(v) => ("converged", g17(v)),
                PathLimit::Diverged => ("diverged", String::new()),
                PathLimit::Inconclusive => ("inconclusive", String::new()),
            };
            let _ = writeln!(out, "\"{}\",{status},{limit}", p.label.replace('"', "\"\""));
        }
        out
    }
}

pub fn compare_trajectories(
    f: &Expression,
    trajectories: &[Trajectory2D],
    schedule: &[f64],
) -> Result<LimitReport, LimitError> {
    if trajectories.len() < 2 {
        return Err(LimitError::InvalidArgument(
            "at least two trajectories required".into(),
        ));
    }
    let paths = trajectories
        .iter()
        .map(|t| limit_along(f, t, schedule))
        .collect::<Result<Vec<_>, _>>()?;

    type Labeled<'a> = (&'a str, f64);
    let converged: Vec<Labeled> = paths
        .iter()
        .filter_map(|p| p.converged().map(|v| (p.label.as_str(), v)))
        .collect();
    let mut widest: Option<(Labeled, Labeled)> = None;
    for (i, a) in converged.iter().enumerate() {
        for b in &converged[i + 1..] {
            let spread = (a.1 - b.1).abs();
            if spread > COMPARISON_TOLERANCE
                && widest.is_none_or(|(p, q)| spread > (p.1 - q.1).abs())
            {
                widest = Some((*a, *b));
            }
        }
    }
    let verdict = if let Some((a, b)) = widest {
        LimitVerdict::DoesNotExist {
            first: (a.0.to_string(), a.1),
            second: (b.0.to_string(), b.1),
        }
    } else if converged.len() == paths.len() {
        LimitVerdict::ConsistentValue(converged[converged.len() - 1].1)
    } else {
        let missing = paths.len() - converged.len();
        LimitVerdict::Inconclusive(format!(
            "{missing} of {} trajectories did not converge",
            paths.len()
        ))
    };
    Ok(LimitReport { paths, verdict })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RadiusRow {
    pub r: f64,
    /// `max |f|` over the circle; infinite when `f` is undefined somewhere on it.
    pub max_abs: f64,
}

impl RadiusRow {
    pub fn ratio(&self) -> f64 {
        self.max_abs / self.r
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PolarScan {
    pub rows: Vec<RadiusRow>,
    pub bounded: bool,
}

impl PolarScan {
    /// `r,max_abs_f,ratio` rows.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("r,max_abs_f,ratio\n");
        for row in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{}",
                g17(row.r),
                g17(row.max_abs),
                g17(row.ratio())
            );
        }
        out
    }

    pub fn to_json(&self) -> Value {
        json!({
            "bounded": self.bounded,
            "cap": json_num(ANGULAR_CAP),
            "rows": self.rows.iter().map(|row| json!({
                "r": json_num(row.r),
                "max_abs_f": json_num(row.max_abs),
                "ratio": json_num(row.ratio()),
            })).collect::<Vec<_>>(),
        })
    }
}

pub fn default_radii() -> Vec<f64> {
    (1..=6).map(|k| 10f64.powi(-k)).collect()
}

fn abs_on_circle(f: &Expression, r: f64, alpha: f64) -> f64 {
    let (s, c) = alpha.sin_cos();
    f.evaluate(&[("x", r * c), ("y", r * s)])
        .map_or(f64::INFINITY, f64::abs)
}

/// Max of `|f|` on the circle of radius `r`.
///
/// The uniform grid is offset half a cell so exact poles on round angles are
/// not sampled. A fixed grid stays a finite distance from any pole, so the
/// best few grid angles are then zoomed in on by successive local subdivision.
fn circle_max(f: &Expression, r: f64, n_angles: usize) -> f64 {
    let cell = TAU / n_angles as f64;
    let mut grid: Vec<(f64, f64)> = (0..n_angles)
        .map(|j| {
            let alpha = (j as f64 + 0.5) * cell;
            (alpha, abs_on_circle(f, r, alpha))
        })
        .collect();
    if grid.iter().any(|(_, v)| v.is_infinite()) {
        return f64::INFINITY;
    }
    grid.sort_by(|a, b| b.1.total_cmp(&a.1));
    let mut best = grid[0].1;
    for &(seed, value) in grid.iter().take(ZOOM_SEEDS) {
        let (mut center, mut center_value, mut half) = (seed, value, cell);
        for _ in 0..ZOOM_ROUNDS {
            let step = 2.0 * half / ZOOM_SAMPLES as f64;
            for i in 0..ZOOM_SAMPLES {
                let alpha = center - half + (i as f64 + 0.5) * step;
                let v = abs_on_circle(f, r, alpha);
                if v > center_value {
                    center_value = v;
                    center = alpha;
                }
            }
            best = best.max(center_value);
            if best.is_infinite() || best / r >= ANGULAR_CAP {
                return best;
            }
            half = step;
        }
    }
    best
}

pub fn angular_bound_scan(
    f: &Expression,
    radii: &[f64],
    n_angles: usize,
) -> Result<PolarScan, LimitError> {
    require_vars(f, &["x", "y"], "x and y")?;
    if n_angles < 360 {
        return Err(LimitError::InvalidArgument(format!(
            "need at least 360 angles, got {n_angles}"
        )));
    }
    if radii.is_empty() || radii.iter().any(|r| !(*r > 0.0) || !r.is_finite()) {
        return Err(LimitError::InvalidArgument("radii must be positive".into()));
    }
    if radii.windows(2).any(|w| w[1] >= w[0]) {
        return Err(LimitError::InvalidArgument(
            "radii must be strictly decreasing".into(),
        ));
    }
    let rows: Vec<RadiusRow> = radii
        .par_iter()
        .map(|&r| RadiusRow {
            r,
            max_abs: circle_max(f, r, n_angles),
        })
        .collect();
    let bounded = rows.iter().all(|row| row.ratio() < ANGULAR_CAP);
    Ok(PolarScan { rows, bounded })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ZeroCell {
    pub i: usize,
    pub j: usize,
    /// Cell center.
    pub x: f64,
    pub y: f64,
}

/// Cells of a `grid_n x grid_n` lattice on `[-r, r]^2` where `f` changes sign
/// between corners or nearly vanishes at a corner. Cells whose closure holds
/// the origin are skipped.
pub fn implicit_zero_scan(
    f: &Expression,
    radius: f64,
    grid_n: usize,
) -> Result<Vec<ZeroCell>, LimitError> {
    require_vars(f, &["x", "y"], "x and y")?;
    if !(radius > 0.0) || !radius.is_finite() {
        return Err(LimitError::InvalidArgument(format!(
            "radius must be positive, got {radius}"
        )));
    }
    if grid_n < 100 {
        return Err(LimitError::InvalidArgument(format!(
            "grid must be at least 100, got {grid_n}"
        )));
    }
    let width = 2.0 * radius / grid_n as f64;
    let coord = |i: usize| -radius + i as f64 * width;
    // corner values row by row; undefined corners are None
    let corners: Vec<Vec<Option<f64>>> = (0..=grid_n)
        .into_par_iter()
        .map(|j| {
            let y = coord(j);
            (0..=grid_n)
                .map(|i| f.evaluate(&[("x", coord(i)), ("y", y)]).ok())
                .collect()
        })
        .collect();
    let mut cells = Vec::new();
    for j in 0..grid_n {
        for i in 0..grid_n {
            let (x_lo, x_hi, y_lo, y_hi) = (coord(i), coord(i + 1), coord(j), coord(j + 1));
            if x_lo <= 0.0 && 0.0 <= x_hi && y_lo <= 0.0 && 0.0 <= y_hi {
                continue;
            }
            let vals = [
                corners[j][i],
                corners[j][i + 1],
                corners[j + 1][i],
                corners[j + 1][i + 1],
            ];
            let vals = vals.iter().flatten();
            let (mut pos, mut neg, mut zero) = (false, false, false);
            for &v in vals {
                zero |= v.abs() < ZERO_EPS;
                pos |= v > 0.0;
                neg |= v < 0.0;
            }
            if zero || (pos && neg) {
                cells.push(ZeroCell {
                    i,
                    j,
                    x: 0.5 * (x_lo + x_hi),
                    y: 0.5 * (y_lo + y_hi),
                });
            }
        }
    }
    Ok(cells)
}

/// `cell_x,cell_y` rows (cell centers).
pub fn cells_csv(cells: &[ZeroCell]) -> String {
    let mut out = String::from("cell_x,cell_y\n");
    for c in cells {
        let _ = writeln!(out, "{},{}", g17(c.x), g17(c.y));
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PathSample {
    pub t: f64,
    pub x: f64,
    pub y: f64,
    pub f: Option<f64>,
}

/// Points along a path for plotting; `f` is `None` where it is undefined.
/// Parameters where the path itself is undefined are dropped.
pub fn trajectory_samples(f: &Expression, traj: &Trajectory2D, ts: &[f64]) -> Vec<PathSample> {
    ts.iter()
        .filter_map(|&t| {
            let (x, y) = traj.point(t).ok()?;
            Some(PathSample {
                t,
                x,
                y,
                f: f.evaluate(&[("x", x), ("y", y)]).ok(),
            })
        })
        .collect()
}

/// `t,x,y,f` rows; empty `f` cell where undefined.
pub fn samples_csv(samples: &[PathSample]) -> String {
    let mut out = String::from("t,x,y,f\n");
    for s in samples {
        let _ = writeln!(
            out,
            "{},{},{},{}",
            g17(s.t),
            g17(s.x),
            g17(s.y),
            s.f.map(g17).unwrap_or_default()
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(s: &str) -> Expression {
        s.parse().unwrap()
    }

    #[test]
    fn path_limits() {
        let f = e("x*y/(x+y)");
        let sched = default_schedule();
        let diag = path("t", "t", "y=x");
        let v = limit_along(&f, &diag, &sched).unwrap().converged().unwrap();
        assert!((v - sched[24] / 2.0).abs() < 1e-20);
        let lc = level_curve_trajectory(1.0).unwrap();
        let v = limit_along(&f, &lc, &sched).unwrap().converged().unwrap();
        assert!((v - 1.0).abs() < 1e-6, "{v}");
        let g = e("(x^3+y^3)/(x^2+y^2)");
        let v = limit_along(&g, &diag, &sched).unwrap().converged().unwrap();
        assert!(v.abs() < 1e-8);
    }

    #[test]
    fn level_curves() {
        let f = e("x*y/(x+y)");
        for a in [1.0, 3.0, -2.0] {
            let v = limit_along(&f, &level_curve_trajectory(a).unwrap(), &default_schedule())
                .unwrap()
                .converged()
                .unwrap();
            assert!((v - a).abs() < 1e-6, "a={a} v={v}");
        }
        assert_eq!(level_curve_trajectory(0.0), Err(LimitError::ZeroLevel));
        assert_eq!(level_curve_trajectory(1.0).unwrap().label(), "level a=1");
    }

    #[test]
    fn skipped_samples_and_divergence() {
        let f = e("x*y/(x+y)");
        let anti = path("t", "-t", "y=-x");
        let out = limit_along(&f, &anti, &default_schedule()).unwrap();
        assert_eq!(out.limit, PathLimit::Inconclusive);
        assert_eq!(out.skipped.len(), 25);

        let blow = e("1/(x^2+y^2)");
        let out = limit_along(&blow, &path("t", "t", "y=x"), &default_schedule()).unwrap();
        assert_eq!(out.limit, PathLimit::Diverged);
    }

    #[test]
    fn schedule_validation() {
        let f = e("x");
        let p = path("t", "t", "d");
        assert!(limit_along(&f, &p, &[1e-1, 1e-5, 1e-9]).is_err());
        assert!(limit_along(&f, &p, &[1e-1, 1e-3, 1e-2, 1e-9]).is_err());
        assert!(limit_along(&f, &p, &[1e-1, 1e-2, 1e-3, 1e-4]).is_err());
        assert!(limit_along(&e("x+z"), &p, &default_schedule()).is_err());
    }

    #[test]
    fn trajectory_validation() {
        assert!(matches!(
            Trajectory2D::parse("1+t", "t"),
            Err(TrajectoryParseError::Limit(
                LimitError::NotApproachingOrigin(_)
            ))
        ));
        assert!(matches!(
            Trajectory2D::parse("t", "s"),
            Err(TrajectoryParseError::Limit(
                LimitError::ForeignVariable { .. }
            ))
        ));
        assert!(Trajectory2D::parse("t", "(").is_err());
        // a small level parameter still validates although t = 0.1 is past the pole
        assert!(level_curve_trajectory(0.1).is_ok());
        assert_eq!(default_trajectories().len(), 6);
    }

    #[test]
    fn comparisons() {
        let f = e("x*y/(x+y)");
        let trajs = vec![path("t", "t", "y=x"), level_curve_trajectory(1.0).unwrap()];
        let r = compare_trajectories(&f, &trajs, &default_schedule()).unwrap();
        assert!(matches!(r.verdict, LimitVerdict::DoesNotExist { .. }));

        let g = e("(x^3+y^3)/(x^2+y^2)");
        let trajs = vec![
            path("t", "t", "a"),
            path("t", "t^2", "b"),
            path("t", "-t", "c"),
        ];
        let r = compare_trajectories(&g, &trajs, &default_schedule()).unwrap();
        match r.verdict {
            LimitVerdict::ConsistentValue(v) => assert!(v.abs() < 1e-8),
            v => panic!("{v:?}"),
        }
        assert_eq!(r.to_json()["conclusive"], false);

        let c = e("2.5");
        let r = compare_trajectories(&c, &default_trajectories(), &default_schedule()).unwrap();
        assert_eq!(r.verdict, LimitVerdict::ConsistentValue(2.5));

        assert!(compare_trajectories(&c, &trajs[..1], &default_schedule()).is_err());
    }

    #[test]
    fn default_set_on_the_rational_example() {
        // y=-x lies in the singular set, so the default set alone cannot decide
        let f = e("x*y/(x+y)");
        let r = compare_trajectories(&f, &default_trajectories(), &default_schedule()).unwrap();
        assert!(
            matches!(r.verdict, LimitVerdict::Inconclusive(_)),
            "{:?}",
            r.verdict
        );
    }

    #[test]
    fn polar_scans() {
        let radii = default_radii();
        let s = angular_bound_scan(&e("(x^3+y^3)/(x^2+y^2)"), &radii, 360).unwrap();
        assert!(s.bounded);
        assert!(s.rows.iter().all(|r| r.ratio() <= 2.0));
        let s = angular_bound_scan(&e("x*y/(x+y)"), &radii, 360).unwrap();
        assert!(!s.bounded);
        let s = angular_bound_scan(&e("x"), &radii, 720).unwrap();
        assert!(s.bounded);
        for row in &s.rows {
            assert!((row.max_abs - row.r).abs() <= 1e-6 * row.r, "{row:?}");
        }
        assert!(angular_bound_scan(&e("x"), &radii, 100).is_err());
        assert!(angular_bound_scan(&e("x"), &[1e-2, 1e-1], 360).is_err());
    }

    #[test]
    fn implicit_scans() {
        let f = e("x^3+y^3-x^2-y^2");
        assert!(implicit_zero_scan(&f, 0.5, 400).unwrap().is_empty());
        let cells = implicit_zero_scan(&f, 1.5, 300).unwrap();
        assert!(!cells.is_empty());
        assert!(cells
            .iter()
            .any(|c| (c.x - 1.0).abs() < 0.02 && (c.y - 1.0).abs() < 0.02));

        let circle = e("x^2+y^2-0.04");
        let cells = implicit_zero_scan(&circle, 0.5, 200).unwrap();
        assert!(!cells.is_empty());
        let diag = 2.0 * 0.5 / 200.0 * std::f64::consts::SQRT_2;
        for c in &cells {
            assert!((c.x.hypot(c.y) - 0.2).abs() <= diag, "{c:?}");
        }
        assert!(implicit_zero_scan(&f, 0.5, 50).is_err());
    }

    #[test]
    fn plotting_rows() {
        let f = e("x*y/(x+y)");
        let s = trajectory_samples(&f, &path("t", "-t", "y=-x"), &[0.5, 0.25]);
        assert_eq!(
            samples_csv(&s),
            "t,x,y,f\n0.5,0.5,-0.5,\n0.25,0.25,-0.25,\n"
        );
        let cells = [ZeroCell {
            i: 0,
            j: 0,
            x: 0.25,
            y: -1.5,
        }];
        assert_eq!(cells_csv(&cells), "cell_x,cell_y\n0.25,-1.5\n");
    }
}
