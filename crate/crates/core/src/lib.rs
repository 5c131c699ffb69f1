//! Diagnostics for ill-posed problems in elementary applied mathematics.
//!
//! Each module reproduces one pathology numerically and classifies it with a
//! machine-readable verdict:
//!
//! * [`blowup`]: solutions of `y' = f(x, y)` escaping their interval of
//!   definition before the requested abscissa (on top of [`ode`]).
//! * [`cooling`]: three-point cooling-law fits whose parameters contradict the
//!   physics they are meant to describe.
//! * [`limits`]: two-variable limits probed along trajectories, on shrinking
//!   circles, and through sign changes of implicit curves.
//! * [`recurrence`]: the averaging recurrence, by iteration and closed form.
//!
//! Right-hand sides, paths and curves are written in the small language of
//! [`expr`].

// `!(v > 0.0)` is used on purpose so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod blowup;
pub mod cli;
pub mod cooling;
pub mod expr;
pub mod format;
pub mod limits;
pub mod ode;
pub mod recurrence;

pub use expr::{EvalError, Expression, ParseError};
pub use ode::{Ivp, Trajectory};
