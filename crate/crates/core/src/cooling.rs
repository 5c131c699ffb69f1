//! Closed-form cooling-law fits from three equally spaced readings.
//!
//! With `T(t) = T_M + (T0 - T_M) e^{k t}` sampled at `0, t1, 2 t1`, the gaps
//! to the medium temperature form a geometric sequence, so
//! `(T1 - T_M)^2 = (T0 - T_M)(T2 - T_M)`. The quadratic terms cancel and
//! `T_M` follows linearly. Whether the fitted parameters describe a physical
//! cooling process is a separate question answered by [`classify`].

use crate::format::{g17, json_num};
use serde_json::{json, Value};
use std::fmt::Write as _;
use thiserror::Error;

/// Absolute zero in degrees Celsius.
pub const ABSOLUTE_ZERO: f64 = -273.15;
/// Absolute tolerance of the feasible-range bisection.
pub const RANGE_TOLERANCE: f64 = 1e-6;
const MAX_BISECTIONS: usize = 200;

#[derive(Clone, Debug, PartialEq, Error)]
pub enum CoolingError {
    #[error("invalid observations: {0}")]
    InvalidObservations(String),
    #[error("no midpoint reading reaches the floor {floor} between {lo} and {hi}")]
    NoRoot { floor: f64, lo: f64, hi: f64 },
}

/// Readings at `t = 0`, `t1` and `2*t1` (minutes, degrees Celsius).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CoolingObservations {
    pub t1: f64,
    pub temps: [f64; 3],
}

impl CoolingObservations {
    pub fn new(t1: f64, t0: f64, t_mid: f64, t2: f64) -> Result<Self, CoolingError> {
        if !(t1 > 0.0 && t1.is_finite()) {
            return Err(CoolingError::InvalidObservations(format!(
                "spacing must be positive, got {t1}"
            )));
        }
        if ![t0, t_mid, t2].iter().all(|v| v.is_finite()) {
            return Err(CoolingError::InvalidObservations(
                "readings must be finite".into(),
            ));
        }
        Ok(CoolingObservations {
            t1,
            temps: [t0, t_mid, t2],
        })
    }

    pub fn times(&self) -> [f64; 3] {
        [0.0, self.t1, 2.0 * self.t1]
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FeasibilityVerdict {
    Feasible,
    /// Monotone-decreasing data but the fitted rate is non-negative.
    SignContradiction,
    /// The three readings lie on a line; no exponential passes through them.
    ColinearDegenerate,
    /// The fitted medium temperature is below the physical floor.
    BelowAbsoluteZero,
    NonMonotoneData,
}

impl FeasibilityVerdict {
    pub fn name(self) -> &'static str {
        match self {
            FeasibilityVerdict::Feasible => "Feasible",
            FeasibilityVerdict::SignContradiction => "SignContradiction",
            FeasibilityVerdict::ColinearDegenerate => "ColinearDegenerate",
            FeasibilityVerdict::BelowAbsoluteZero => "BelowAbsoluteZero",
            FeasibilityVerdict::NonMonotoneData => "NonMonotoneData",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CoolingParams {
    /// Medium temperature.
    pub t_m: f64,
    /// Rate constant per minute.
    pub k: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CoolingFit {
    pub obs: CoolingObservations,
    /// Absent for `ColinearDegenerate` and `NonMonotoneData`.
    pub params: Option<CoolingParams>,
    pub verdict: FeasibilityVerdict,
}

impl CoolingFit {
    /// `predict(t_i) - T_i` for the three readings.
    pub fn residuals(&self) -> Option<[f64; 3]> {
        let p = self.params?;
        let t0 = self.obs.temps[0];
        let times = self.obs.times();
        Some(std::array::from_fn(|i| {
            predict(p.t_m, p.k, t0, times[i]) - self.obs.temps[i]
        }))
    }

    pub fn to_json(&self) -> Value {
        let residuals = match self.residuals() {
            Some(r) => json!(r.iter().map(|v| json_num(*v)).collect::<Vec<_>>()),
            None => Value::Null,
        };
        json!({
            "T_M": self.params.map_or(Value::Null, |p| json_num(p.t_m)),
            "k": self.params.map_or(Value::Null, |p| json_num(p.k)),
            "verdict": self.verdict.name(),
            "residuals": residuals,
        })
    }
}

/// Medium temperature as a function of the middle reading; `None` at the
/// colinear pole `2c = T0 + T2`.
pub fn tm_of_midpoint(c: f64, t0: f64, t2: f64) -> Option<f64> {
    let denom = 2.0 * c - t0 - t2;
    if denom == 0.0 {
        None
    } else {
        Some((c * c - t0 * t2) / denom)
    }
}

pub fn fit_three_point(obs: &CoolingObservations, floor: f64) -> CoolingFit {
    let [t0, t_mid, t2] = obs.temps;
    let no_fit = |verdict| CoolingFit {
        obs: *obs,
        params: None,
        verdict,
    };
    if !(t0 > t_mid && t_mid > t2) {
        return no_fit(FeasibilityVerdict::NonMonotoneData);
    }
    let Some(t_m) = tm_of_midpoint(t_mid, t0, t2) else {
        return no_fit(FeasibilityVerdict::ColinearDegenerate);
    };
    // For concave data both gaps are negative, so the ratio stays positive and
    // the logarithm is defined; the positive k that results is reported as is.
    let k = ((t_mid - t_m) / (t0 - t_m)).ln() / obs.t1;
    let verdict = classify(t_m, k, floor);
    CoolingFit {
        obs: *obs,
        params: Some(CoolingParams { t_m, k }),
        verdict,
    }
}

/// The floor check takes precedence over the sign check.
pub fn classify(t_m: f64, k: f64, floor: f64) -> FeasibilityVerdict {
    if t_m < floor {
        FeasibilityVerdict::BelowAbsoluteZero
    } else if k >= 0.0 {
        FeasibilityVerdict::SignContradiction
    } else {
        FeasibilityVerdict::Feasible
    }
}

/// `T_M + (T_start - T_M) e^{k t}`.
pub fn predict(t_m: f64, k: f64, t_start: f64, t: f64) -> f64 {
    t_m + (t_start - t_m) * (k * t).exp()
}

/// Admissible middle readings `c_low < c <= c_high`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MidpointRange {
    pub c_low: f64,
    pub c_high: f64,
    pub iterations: usize,
}

impl MidpointRange {
    pub fn to_json(&self, t0: f64, t2: f64, floor: f64) -> Value {
        json!({
            "T0": json_num(t0),
            "T2": json_num(t2),
            "floor": json_num(floor),
            "c_low": json_num(self.c_low),
            "c_low_inclusive": false,
            "c_high": json_num(self.c_high),
            "c_high_inclusive": true,
            "pole": json_num((t0 + t2) / 2.0),
            "iterations": self.iterations,
        })
    }
}

/// Finds the largest middle reading whose fitted medium temperature stays at
/// or above `floor`.
///
/// On `(T2, (T0+T2)/2)` the medium temperature falls from `T2` towards
/// `-inf` at the colinear pole, so the crossing with `floor` is unique.
pub fn feasible_midpoint_range(
    t0: f64,
    t2: f64,
    floor: f64,
) -> Result<MidpointRange, CoolingError> {
    if !(t0 > t2) || !t0.is_finite() || !t2.is_finite() {
        return Err(CoolingError::InvalidObservations(format!(
            "first reading {t0} must exceed last reading {t2}"
        )));
    }
    let pole = (t0 + t2) / 2.0;
    let no_root = CoolingError::NoRoot {
        floor,
        lo: t2,
        hi: pole,
    };
    if !(floor < t2) {
        return Err(no_root);
    }
    // g >= 0 on the feasible side; the pole itself counts as -inf
    let g = |c: f64| tm_of_midpoint(c, t0, t2).map_or(f64::NEG_INFINITY, |tm| tm - floor);
    let (mut lo, mut hi) = (t2, pole);
    let mut iterations = 0;
    while hi - lo > RANGE_TOLERANCE {
        if iterations == MAX_BISECTIONS {
            return Err(no_root);
        }
        iterations += 1;
        let mid = 0.5 * (lo + hi);
        if g(mid) >= 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(MidpointRange {
        c_low: t2,
        c_high: lo,
        iterations,
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SweepRow {
    pub c: f64,
    pub fit: CoolingFit,
}

/// Fits `(T0, c, T2)` for each `c`.
pub fn midpoint_sweep(
    t1: f64,
    t0: f64,
    t2: f64,
    floor: f64,
    cs: &[f64],
) -> Result<Vec<SweepRow>, CoolingError> {
    cs.iter()
        .map(|&c| {
            let obs = CoolingObservations::new(t1, t0, c, t2)?;
            Ok(SweepRow {
                c,
                fit: fit_three_point(&obs, floor),
            })
        })
        .collect()
}

/// `n` readings evenly inside `(t2, t0)`.
pub fn sweep_grid(t0: f64, t2: f64, n: usize) -> Vec<f64> {
    (1..=n)
        .map(|i| t2 + (t0 - t2) * i as f64 / (n + 1) as f64)
        .collect()
}

/// CSV with header `c,T_M,k,verdict`; empty cells where no fit exists.
pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from("c,T_M,k,verdict\n");
    for r in rows {
        let (tm, k) = r
            .fit
            .params
            .map_or((String::new(), String::new()), |p| (g17(p.t_m), g17(p.k)));
        let _ = writeln!(out, "{},{},{},{}", g17(r.c), tm, k, r.fit.verdict.name());
    }
    out
}

pub fn sweep_json(rows: &[SweepRow]) -> Value {
    Value::Array(
        rows.iter()
            .map(|r| {
                json!({
                    "c": json_num(r.c),
                    "T_M": r.fit.params.map_or(Value::Null, |p| json_num(p.t_m)),
                    "k": r.fit.params.map_or(Value::Null, |p| json_num(p.k)),
                    "verdict": r.fit.verdict.name(),
                })
            })
            .collect(),
    )
}
