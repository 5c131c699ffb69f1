//! Scalar first-order initial value problems and fixed-step explicit integrators.

use crate::expr::{EvalError, Expression};
use std::fmt::Write as _;
use thiserror::Error;

/// Integration stops once |y| exceeds this bound.
pub const OVERFLOW_GUARD: f64 = 1e300;

#[derive(Clone, Debug, PartialEq, Error)]
pub enum OdeError {
    #[error("right-hand side may only use x and y, found `{0}`")]
    ForeignVariable(String),
    #[error("step size must be positive and finite, got {0}")]
    BadStep(f64),
    #[error("initial condition must be finite")]
    BadInitial,
    #[error(transparent)]
    Eval(#[from] EvalError),
}

/// `y' = f(x, y)`, `y(x0) = y0`.
#[derive(Clone, Debug, PartialEq)]
pub struct Ivp {
    rhs: Expression,
    x0: f64,
    y0: f64,
}

impl Ivp {
    pub fn new(rhs: Expression, x0: f64, y0: f64) -> Result<Ivp, OdeError> {
        if let Some(v) = rhs
            .free_variables()
            .into_iter()
            .find(|v| v != "x" && v != "y")
        {
            return Err(OdeError::ForeignVariable(v));
        }
        if !x0.is_finite() || !y0.is_finite() {
            return Err(OdeError::BadInitial);
        }
        Ok(Ivp { rhs, x0, y0 })
    }

    pub fn rhs(&self) -> &Expression {
        &self.rhs
    }

    pub fn x0(&self) -> f64 {
        self.x0
    }

    pub fn y0(&self) -> f64 {
        self.y0
    }

    /// Grid abscissa `x0 + k*h`, computed directly rather than accumulated.
    pub fn grid_x(&self, k: usize, h: f64) -> f64 {
        self.x0 + k as f64 * h
    }

    fn slope(&self, x: f64, y: f64) -> Result<f64, EvalError> {
        self.rhs.evaluate(&[("x", x), ("y", y)])
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    Euler,
    Rk4,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Point {
    pub k: usize,
    pub x: f64,
    pub y: f64,
}

/// Why a trajectory stopped before the requested number of steps.
#[derive(Clone, Debug, PartialEq)]
pub enum Termination {
    /// The right-hand side was undefined while computing the next step.
    Domain(EvalError),
    /// The next value would have exceeded [`OVERFLOW_GUARD`] in magnitude.
    Overflow,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    pub h: f64,
    pub method: Method,
    pub points: Vec<Point>,
    pub termination: Option<Termination>,
}

impl Trajectory {
    pub fn last(&self) -> &Point {
        self.points
            .last()
            .expect("trajectory always holds the initial point")
    }

    pub fn terminated_early(&self) -> bool {
        self.termination.is_some()
    }

    /// CSV with header `n,x_n,y_n`. `round` limits decimals for presentation.
    pub fn to_csv(&self, round: Option<usize>) -> String {
        let mut out = String::from("n,x_n,y_n\n");
        for p in &self.points {
            let _ = writeln!(
                out,
                "{},{},{}",
                p.k,
                crate::format::fixed(p.x, round),
                crate::format::fixed(p.y, round)
            );
        }
        out
    }
}

/// One explicit Euler step: `y + f(x, y) * h`.
pub fn euler_step(rhs: &Expression, x: f64, y: f64, h: f64) -> Result<f64, OdeError> {
    check_step(h)?;
    let slope = rhs.evaluate(&[("x", x), ("y", y)])?;
    Ok(y + slope * h)
}

fn check_step(h: f64) -> Result<(), OdeError> {
    if h > 0.0 && h.is_finite() {
        Ok(())
    } else {
        Err(OdeError::BadStep(h))
    }
}

/// Iterates grid points of a fixed-step integration lazily.
///
/// Yields `Ok(point)` for each grid point starting at `k = 0`, then at most one
/// `Err(termination)` when the integration cannot continue.
pub struct Stepper<'a> {
    ivp: &'a Ivp,
    h: f64,
    method: Method,
    k: usize,
    y: f64,
    done: bool,
    started: bool,
}

impl<'a> Stepper<'a> {
    pub fn new(ivp: &'a Ivp, h: f64, method: Method) -> Result<Stepper<'a>, OdeError> {
        check_step(h)?;
        Ok(Stepper {
            ivp,
            h,
            method,
            k: 0,
            y: ivp.y0,
            done: false,
            started: false,
        })
    }

    fn advance(&self) -> Result<f64, EvalError> {
        let (x, y, h) = (self.ivp.grid_x(self.k, self.h), self.y, self.h);
        match self.method {
            Method::Euler => Ok(y + self.ivp.slope(x, y)? * h),
            Method::Rk4 => {
                let half = h / 2.0;
                let x_mid = x + half;
                let x_end = self.ivp.grid_x(self.k + 1, h);
                let k1 = self.ivp.slope(x, y)?;
                let k2 = self.ivp.slope(x_mid, y + half * k1)?;
                let k3 = self.ivp.slope(x_mid, y + half * k2)?;
                let k4 = self.ivp.slope(x_end, y + h * k3)?;
                Ok(y + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4))
            }
        }
    }
}

impl Iterator for Stepper<'_> {
    type Item = Result<Point, Termination>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.done {
            return None;
        }
        if !self.started {
            self.started = true;
            return Some(Ok(Point {
                k: 0,
                x: self.ivp.x0,
                y: self.y,
            }));
        }
        match self.advance() {
            Err(e) => {
                self.done = true;
                Some(Err(Termination::Domain(e)))
            }
            Ok(next) if next.is_nan() || next.abs() > OVERFLOW_GUARD => {
                self.done = true;
                Some(Err(Termination::Overflow))
            }
            Ok(next) => {
                self.k += 1;
                self.y = next;
                Some(Ok(Point {
                    k: self.k,
                    x: self.ivp.grid_x(self.k, self.h),
                    y: next,
                }))
            }
        }
    }
}

pub fn integrate(
    ivp: &Ivp,
    h: f64,
    n_steps: usize,
    method: Method,
) -> Result<Trajectory, OdeError> {
    let mut points = Vec::with_capacity(n_steps + 1);
    let mut termination = None;
    for item in Stepper::new(ivp, h, method)?.take(n_steps + 1) {
        match item {
            Ok(p) => points.push(p),
            Err(t) => termination = Some(t),
        }
    }
    Ok(Trajectory {
        h,
        method,
        points,
        termination,
    })
}

pub fn integrate_euler(ivp: &Ivp, h: f64, n_steps: usize) -> Result<Trajectory, OdeError> {
    integrate(ivp, h, n_steps, Method::Euler)
}

pub fn integrate_rk4(ivp: &Ivp, h: f64, n_steps: usize) -> Result<Trajectory, OdeError> {
    integrate(ivp, h, n_steps, Method::Rk4)
}
