//! The averaging recurrence `x_{n+2} = (x_{n+1} + x_n) / 2`.
//!
//! Its characteristic polynomial `2r^2 - r - 1` has roots `1` and `-1/2`, so
//! `x_n = (a + 2b)/3 + (2/3)(a - b)(-1/2)^n` with `x_0 = a`, `x_1 = b`.
//! At `n = 0` this is `(a + 2b + 2a - 2b)/3 = a`; at `n = 1` it is
//! `(a + 2b - a + b)/3 = b`.

use std::fmt::Write as _;

/// Number of consecutive sub-tolerance differences required by [`detect_limit`].
pub const SETTLE_RUN: usize = 5;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RecurrenceInstance {
    pub a: f64,
    pub b: f64,
}

impl RecurrenceInstance {
    pub fn new(a: f64, b: f64) -> Self {
        RecurrenceInstance { a, b }
    }

    pub fn limit(&self) -> f64 {
        (self.a + 2.0 * self.b) / 3.0
    }
}

/// `x_0 ..= x_n` by direct application of the recurrence.
pub fn iterate_recurrence(inst: RecurrenceInstance, n: usize) -> Vec<f64> {
    let mut xs = Vec::with_capacity(n + 1);
    xs.push(inst.a);
    if n >= 1 {
        xs.push(inst.b);
    }
    while xs.len() <= n {
        let len = xs.len();
        xs.push((xs[len - 1] + xs[len - 2]) / 2.0);
    }
    xs
}

pub fn closed_form(inst: RecurrenceInstance, n: usize) -> f64 {
    // (-1/2)^n underflows to zero long before n leaves i32 range
    let decay = (-0.5f64).powi(n.min(2000) as i32);
    inst.limit() + 2.0 / 3.0 * (inst.a - inst.b) * decay
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SettledLimit {
    pub limit: f64,
    pub settled_at: usize,
}

/// Returns the final value and the first index after which every successive
/// difference stays below `tol`. At least [`SETTLE_RUN`] such differences must
/// follow the settling index.
pub fn detect_limit(seq: &[f64], tol: f64) -> Option<SettledLimit> {
    if !(tol > 0.0) || seq.len() < SETTLE_RUN + 1 {
        return None;
    }
    let mut settled_at = seq.len() - 1;
    for i in (0..seq.len() - 1).rev() {
        if (seq[i + 1] - seq[i]).abs() < tol {
            settled_at = i;
        } else {
            break;
        }
    }
    if seq.len() - 1 - settled_at < SETTLE_RUN {
        return None;
    }
    Some(SettledLimit {
        limit: seq[seq.len() - 1],
        settled_at,
    })
}

/// CSV with header `n,x_n`.
pub fn sequence_csv(seq: &[f64], round: Option<usize>) -> String {
    let mut out = String::from("n,x_n\n");
    for (n, x) in seq.iter().enumerate() {
        let _ = writeln!(out, "{n},{}", crate::format::fixed(*x, round));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hand_iteration() {
        assert_eq!(
            iterate_recurrence(RecurrenceInstance::new(0.0, 1.0), 4),
            vec![0.0, 1.0, 0.5, 0.75, 0.625]
        );
        assert_eq!(
            iterate_recurrence(RecurrenceInstance::new(2.0, 9.0), 0),
            vec![2.0]
        );
        assert!(iterate_recurrence(RecurrenceInstance::new(7.5, 7.5), 30)
            .iter()
            .all(|&x| x == 7.5));
    }

    #[test]
    fn long_run_limits() {
        let xs = iterate_recurrence(RecurrenceInstance::new(3.0, 0.0), 200);
        assert!((xs[200] - 1.0).abs() < 1e-12);
        let xs = iterate_recurrence(RecurrenceInstance::new(0.0, 1.0), 200);
        assert!((xs[200] - 2.0 / 3.0).abs() < 1e-10);
    }

    #[test]
    fn closed_form_endpoints() {
        let inst = RecurrenceInstance::new(-4.25, 11.0);
        assert!((closed_form(inst, 0) - -4.25).abs() < 1e-12);
        assert!((closed_form(inst, 1) - 11.0).abs() < 1e-12);
        assert_eq!(closed_form(RecurrenceInstance::new(3.0, 3.0), 0), 3.0);
        assert!((closed_form(inst, 1_000_000) - inst.limit()).abs() < 1e-15);
        assert!((closed_form(RecurrenceInstance::new(0.0, 1.0), 2) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn limit_detection() {
        let xs = iterate_recurrence(RecurrenceInstance::new(0.0, 1.0), 60);
        let s = detect_limit(&xs, 1e-10).unwrap();
        assert!((s.limit - 2.0 / 3.0).abs() < 1e-10);
        assert!(s.settled_at > 0 && s.settled_at < 60);

        let s = detect_limit(&[4.0; 10], 1e-10).unwrap();
        assert_eq!(
            s,
            SettledLimit {
                limit: 4.0,
                settled_at: 0
            }
        );

        let osc: Vec<f64> = (0..40).map(|i| (i % 2) as f64).collect();
        assert_eq!(detect_limit(&osc, 1e-3), None);
    }

    #[test]
    fn short_tail_is_not_settled() {
        // only four small differences at the end
        let seq = [0.0, 1.0, 0.0, 1.0, 1.0, 1.0, 1.0, 1.0];
        assert_eq!(detect_limit(&seq, 1e-6), None);
        let seq = [0.0, 1.0, 0.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0];
        assert_eq!(detect_limit(&seq, 1e-6).unwrap().settled_at, 3);
        assert_eq!(detect_limit(&[1.0; 10], 0.0), None);
    }

    #[test]
    fn csv_rows() {
        let xs = iterate_recurrence(RecurrenceInstance::new(0.0, 0.0), 2);
        assert_eq!(sequence_csv(&xs, None), "n,x_n\n0,0\n1,0\n2,0\n");
    }
}
