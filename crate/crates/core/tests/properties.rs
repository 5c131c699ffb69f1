use illposed::blowup::{estimate_blowup, threshold_crossing, BlowupConfig, Verdict};
use illposed::cooling::{
    feasible_midpoint_range, fit_three_point, predict, tm_of_midpoint, CoolingObservations,
    FeasibilityVerdict, ABSOLUTE_ZERO,
};
use illposed::limits::{
    angular_bound_scan, compare_trajectories, default_radii, default_schedule,
    level_curve_trajectory, limit_along, LimitVerdict, PathLimit, Trajectory2D,
    COMPARISON_TOLERANCE,
};
use illposed::ode::{integrate_euler, integrate_rk4, Ivp};
use illposed::recurrence::{closed_form, detect_limit, iterate_recurrence, RecurrenceInstance};
use illposed::Expression;
use proptest::prelude::*;
use std::f64::consts::{E, FRAC_PI_2};
use std::sync::OnceLock;

fn expr(s: &str) -> Expression {
    Expression::parse(s).unwrap()
}

fn source() -> impl Strategy<Value = String> {
    let leaf = prop_oneof![
        (0u32..1000).prop_map(|n| n.to_string()),
        (0.0f64..1e3).prop_map(|v| format!("{v}")),
        (1e-9f64..1e9).prop_map(|v| format!("{v:e}")),
        Just("x".to_string()),
        Just("y".to_string()),
        Just("pi".to_string()),
    ];
    leaf.prop_recursive(6, 48, 3, |inner| {
        prop_oneof![
            (
                inner.clone(),
                prop::sample::select(vec!["+", "-", "*", "/", "^"]),
                inner.clone(),
                any::<bool>()
            )
                .prop_map(|(a, op, b, spaced)| if spaced {
                    format!("{a} {op} {b}")
                } else {
                    format!("({a}){op}({b})")
                }),
            inner.clone().prop_map(|a| format!("-{a}")),
            inner.clone().prop_map(|a| format!("({a})")),
            (
                prop::sample::select(vec!["sin", "cos", "tan", "exp", "ln", "sqrt", "abs"]),
                inner
            )
                .prop_map(|(f, a)| format!("{f}({a})")),
        ]
    })
}

proptest! {
    #[test]
    fn printed_expressions_reparse_to_the_same_tree(src in source()) {
        let e = expr(&src);
        let again = Expression::parse(&e.to_string()).unwrap();
        prop_assert_eq!(e.root(), again.root());
    }

    #[test]
    fn arbitrary_text_never_panics(src in "[ -~λπ]{0,40}") {
        match Expression::parse(&src) {
            Ok(e) => { let _ = e.evaluate(&[("x", 0.5), ("y", 2.0)]); }
            Err(err) => prop_assert!(err.offset() <= src.len()),
        }
    }

    #[test]
    fn euler_steps_are_bitwise_reproducible(
        rhs in prop::sample::select(vec!["y^2+1", "x - y", "sin(x*y)", "-2*y + x^2"]),
        h in 0.001f64..0.2,
        y0 in -1.0f64..1.0,
    ) {
        let f = expr(rhs);
        let ivp = Ivp::new(f.clone(), 0.0, y0).unwrap();
        let traj = integrate_euler(&ivp, h, 20).unwrap();
        for w in traj.points.windows(2) {
            let slope = f.evaluate(&[("x", w[0].x), ("y", w[0].y)]).unwrap();
            prop_assert_eq!(w[1].y.to_bits(), (w[0].y + h * slope).to_bits());
            prop_assert_eq!(w[1].x.to_bits(), (h * w[1].k as f64).to_bits());
        }
    }

    #[test]
    fn euler_without_y_is_a_left_riemann_sum(
        rhs in prop::sample::select(vec!["x^2", "cos(x)", "exp(-x)", "3*x - 1"]),
        x0 in -1.0f64..1.0,
        h in 0.01f64..0.1,
        n in 1usize..200,
    ) {
        let f = expr(rhs);
        let traj = integrate_euler(&Ivp::new(f.clone(), x0, 0.0).unwrap(), h, n).unwrap();
        let sum: f64 = (0..n).map(|k| h * f.evaluate(&[("x", x0 + k as f64 * h)]).unwrap()).sum();
        let got = traj.last().y;
        prop_assert!((got - sum).abs() <= 1e-12 * sum.abs().max(1.0), "{} vs {}", got, sum);
    }

    #[test]
    fn threshold_crossing_is_monotone_in_m(m1 in 1.0f64..1e6, factor in 1.0f64..1e3, h in 0.001f64..0.05) {
        let ivp = Ivp::new(expr("y^2+1"), 0.0, 0.0).unwrap();
        let a = threshold_crossing(&ivp, h, 3.0, m1).unwrap();
        let b = threshold_crossing(&ivp, h, 3.0, m1 * factor).unwrap();
        if let (Some(a), Some(b)) = (a, b) {
            prop_assert!(a <= b);
        }
    }

    #[test]
    fn rational_steps_never_land_on_the_pole(n in 1u32..5000) {
        let h = 1.0 / n as f64;
        let ivp = Ivp::new(expr("y^2+1"), 0.0, 0.0).unwrap();
        for k in 0..=(2 * n as usize) {
            prop_assert_ne!(ivp.grid_x(k, h), FRAC_PI_2);
        }
    }

    #[test]
    fn fits_reproduce_their_data(t0 in -50.0f64..150.0, d1 in 0.1f64..40.0, d2 in 0.1f64..40.0, t1 in 0.1f64..10.0) {
        let obs = CoolingObservations::new(t1, t0, t0 - d1, t0 - d1 - d2).unwrap();
        let fit = fit_three_point(&obs, ABSOLUTE_ZERO);
        prop_assume!(fit.params.is_some());
        let p = fit.params.unwrap();
        prop_assert!(matches!(
            fit.verdict,
            FeasibilityVerdict::Feasible | FeasibilityVerdict::SignContradiction | FeasibilityVerdict::BelowAbsoluteZero
        ));
        let scale = obs.temps.iter().fold(p.t_m.abs(), |m, v| m.max(v.abs()));
        prop_assume!(scale < 1e6);
        for (t, want) in obs.times().iter().zip(obs.temps) {
            let got = predict(p.t_m, p.k, obs.temps[0], *t);
            prop_assert!((got - want).abs() <= 1e-9 * scale.max(1.0), "t={}: {} vs {}", t, got, want);
        }
        let [a, b, c] = obs.temps;
        let lhs = (b - p.t_m).powi(2);
        let rhs = (a - p.t_m) * (c - p.t_m);
        prop_assert!((lhs - rhs).abs() <= 1e-9 * lhs.abs().max(1.0), "{} vs {}", lhs, rhs);
        // the full-interval ratio gives the same rate
        let k2 = ((c - p.t_m) / (a - p.t_m)).ln() / (2.0 * t1);
        prop_assert!((k2 - p.k).abs() <= 1e-9 * p.k.abs().max(1.0));
    }

    #[test]
    fn midpoints_inside_the_range_are_feasible(t2 in -100.0f64..100.0, gap in 1.0f64..80.0, u in 0.001f64..0.999) {
        let t0 = t2 + gap;
        let range = feasible_midpoint_range(t0, t2, ABSOLUTE_ZERO).unwrap();
        let c = range.c_low + u * (range.c_high - range.c_low);
        prop_assume!(c > range.c_low && c < range.c_high);
        let fit = fit_three_point(&CoolingObservations::new(1.0, t0, c, t2).unwrap(), ABSOLUTE_ZERO);
        prop_assert_eq!(fit.verdict, FeasibilityVerdict::Feasible);

        let pole = (t0 + t2) / 2.0;
        let beyond = range.c_high + (pole - range.c_high) * u.max(0.01);
        prop_assume!(beyond > range.c_high + 1e-5 && beyond < pole);
        prop_assert!(tm_of_midpoint(beyond, t0, t2).unwrap() < ABSOLUTE_ZERO);
        let fit = fit_three_point(&CoolingObservations::new(1.0, t0, beyond, t2).unwrap(), ABSOLUTE_ZERO);
        prop_assert_eq!(fit.verdict, FeasibilityVerdict::BelowAbsoluteZero);
    }

    #[test]
    fn recurrence_distance_to_the_limit_halves(a in -100.0f64..100.0, b in -100.0f64..100.0) {
        let inst = RecurrenceInstance::new(a, b);
        let l = inst.limit();
        let seq = iterate_recurrence(inst, 30);
        for w in seq.windows(2) {
            let (d0, d1) = ((w[0] - l).abs(), (w[1] - l).abs());
            // below this gap the rounding of x_n and L (about 1e-14 here) swamps the ratio
            if d0 >= 1e-4 * a.abs().max(b.abs()).max(1.0) {
                prop_assert!((d1 / d0 - 0.5).abs() <= 1e-9, "{} / {}", d1, d0);
            }
        }
        for n in [0usize, 1, 2, 7, 30] {
            prop_assert!((closed_form(inst, n) - seq[n]).abs() <= 1e-12);
        }
        let long = iterate_recurrence(inst, 200);
        let settled = detect_limit(&long, 1e-10).unwrap();
        prop_assert!((settled.limit - l).abs() <= 1e-10);
    }

    #[test]
    fn level_curves_hold_their_value(a in prop_oneof![-50.0f64..-0.01, 0.01f64..50.0], u in 0.0f64..1.0) {
        let traj = level_curve_trajectory(a).unwrap();
        let f = expr("x*y/(x+y)");
        let t = 1e-4f64.max(a.abs() * 1e-4) + u * (a.abs() / 2.0 - 1e-4f64.max(a.abs() * 1e-4)) * 0.999;
        for t in [t, -t] {
            let (x, y) = traj.point(t).unwrap();
            let v = f.evaluate(&[("x", x), ("y", y)]).unwrap();
            prop_assert!((v - a).abs() <= 1e-9 * a.abs().max(1.0), "t={}: {} vs {}", t, v, a);
        }
    }

    #[test]
    fn polar_bound_forces_path_limits_to_zero(
        cx in -3.0f64..3.0,
        cy in -3.0f64..3.0,
        px in 1u32..4,
        py in 1u32..4,
    ) {
        let f = expr("(x^3+y^3)/(x^2+y^2)");
        static BOUNDED: OnceLock<bool> = OnceLock::new();
        let bounded = *BOUNDED.get_or_init(|| {
            let scan = angular_bound_scan(&f, &default_radii(), 360).unwrap();
            scan.bounded && scan.rows.windows(2).all(|w| w[1].max_abs < w[0].max_abs)
        });
        prop_assert!(bounded);
        prop_assume!(cx.abs() > 1e-3 || cy.abs() > 1e-3);
        let traj = Trajectory2D::parse(&format!("({cx:?})*t^{px}"), &format!("({cy:?})*t^{py}")).unwrap();
        let outcome = limit_along(&f, &traj, &default_schedule()).unwrap();
        match outcome.limit {
            PathLimit::Converged(v) => prop_assert!(v.abs() <= COMPARISON_TOLERANCE),
            other => prop_assert!(false, "{:?}", other),
        }
    }
}

#[test]
fn euler_and_rk4_orders() {
    let ivp = Ivp::new(expr("y"), 0.0, 1.0).unwrap();
    let err = |h: f64, rk4: bool| {
        let n = (1.0 / h).round() as usize;
        let t = if rk4 {
            integrate_rk4(&ivp, h, n)
        } else {
            integrate_euler(&ivp, h, n)
        }
        .unwrap();
        (t.last().y - E).abs()
    };
    for h in [0.1, 0.05, 0.025] {
        let euler = err(h, false) / err(h / 2.0, false);
        assert!((euler - 2.0).abs() <= 0.2, "euler ratio {euler} at h={h}");
        let rk4 = err(h, true) / err(h / 2.0, true);
        assert!((rk4 - 16.0).abs() <= 3.0, "rk4 ratio {rk4} at h={h}");
    }
}

#[test]
fn refined_crossings_decrease_toward_the_pole() {
    let ivp = Ivp::new(expr("y^2+1"), 0.0, 0.0).unwrap();
    let m: f64 = 1e8;
    let report = estimate_blowup(&ivp, 2.0, &BlowupConfig::default());
    assert!(matches!(report.verdict, Verdict::BlowupDetected { .. }));
    let xs: Vec<f64> = report
        .evidence
        .iter()
        .map(|e| e.crossing_x.unwrap())
        .collect();
    assert!(xs.windows(2).all(|w| w[1] < w[0]), "{xs:?}");
    assert!(xs.iter().all(|&x| x >= m.atan()));
    let hs: Vec<f64> = report.evidence.iter().map(|e| e.h).collect();
    assert!(hs.windows(2).all(|w| w[1] < w[0]));
}

#[test]
fn does_not_exist_only_with_two_converged_paths() {
    let f = expr("x*y/(x+y)");
    let schedule = default_schedule();
    let diverging = Trajectory2D::parse("t", "-t+t^3").unwrap();
    let report = compare_trajectories(
        &f,
        &[diverging, level_curve_trajectory(1.0).unwrap()],
        &schedule,
    )
    .unwrap();
    assert!(
        !matches!(report.verdict, LimitVerdict::DoesNotExist { .. }),
        "{:?}",
        report.verdict
    );

    let report = compare_trajectories(
        &f,
        &[
            Trajectory2D::parse("t", "t").unwrap(),
            level_curve_trajectory(2.0).unwrap(),
        ],
        &schedule,
    )
    .unwrap();
    let LimitVerdict::DoesNotExist { first, second } = &report.verdict else {
        panic!("{:?}", report.verdict);
    };
    assert!((first.1 - second.1).abs() > COMPARISON_TOLERANCE);
    for p in &report.paths {
        assert!(p.converged().is_some());
    }
}
