use illposed_ffi::*;
use std::ffi::{CStr, CString};
use std::path::Path;
use std::ptr;

fn parse(src: &str) -> *mut IllposedExpr {
    let src = CString::new(src).unwrap();
    let mut out = ptr::null_mut();
    let status = unsafe { illposed_expr_parse(src.as_ptr(), &mut out, ptr::null_mut()) };
    assert_eq!(status, IllposedStatus::Ok);
    out
}

fn last_error() -> String {
    unsafe { CStr::from_ptr(illposed_last_error()) }
        .to_string_lossy()
        .into_owned()
}

#[test]
fn parse_and_evaluate() {
    let e = parse("x^2 + 3*y");
    let names = [CString::new("x").unwrap(), CString::new("y").unwrap()];
    let ptrs: Vec<_> = names.iter().map(|n| n.as_ptr()).collect();
    let values = [2.0, 5.0];
    let mut v = 0.0;
    let status = unsafe { illposed_expr_eval(e, ptrs.as_ptr(), values.as_ptr(), 2, &mut v) };
    assert_eq!(status, IllposedStatus::Ok);
    assert_eq!(v, 19.0);

    let status = unsafe { illposed_expr_eval(e, ptrs.as_ptr(), values.as_ptr(), 1, &mut v) };
    assert_eq!(status, IllposedStatus::EvalError);
    assert!(last_error().contains('y'), "{}", last_error());
    unsafe { illposed_expr_free(e) };
}

#[test]
fn parse_error_reports_offset() {
    let src = CString::new("y++1").unwrap();
    let mut out = ptr::null_mut();
    let mut offset = usize::MAX;
    let status = unsafe { illposed_expr_parse(src.as_ptr(), &mut out, &mut offset) };
    assert_eq!(status, IllposedStatus::ParseError);
    assert_eq!(offset, 2);
    assert!(out.is_null());
    assert!(!last_error().is_empty());
}

#[test]
fn null_pointers_are_rejected() {
    let mut out = ptr::null_mut();
    let status = unsafe { illposed_expr_parse(ptr::null(), &mut out, ptr::null_mut()) };
    assert_eq!(status, IllposedStatus::NullPointer);
    let status = unsafe { illposed_cooling_fit(0.5, 70.0, 40.0, 30.0, -273.15, ptr::null_mut()) };
    assert_eq!(status, IllposedStatus::NullPointer);
    unsafe {
        illposed_expr_free(ptr::null_mut());
        illposed_trajectory_free(ptr::null_mut());
    }
}

#[test]
fn euler_trajectory_matches_reference_table() {
    let rhs = parse("y^2 + 1");
    let mut traj = ptr::null_mut();
    let status = unsafe {
        illposed_integrate(
            rhs,
            0.0,
            0.0,
            0.2,
            10,
            IllposedMethod::Euler as u32,
            &mut traj,
        )
    };
    assert_eq!(status, IllposedStatus::Ok);
    assert_eq!(unsafe { illposed_trajectory_len(traj) }, 11);
    assert!(!unsafe { illposed_trajectory_terminated_early(traj) });
    let (mut x, mut y) = (0.0, 0.0);
    assert_eq!(
        unsafe { illposed_trajectory_point(traj, 10, &mut x, &mut y) },
        IllposedStatus::Ok
    );
    assert!((x - 2.0).abs() < 1e-12);
    assert!((y - 22.477785021224882).abs() < 1e-9);
    assert_eq!(
        unsafe { illposed_trajectory_point(traj, 11, &mut x, &mut y) },
        IllposedStatus::InvalidArgument
    );
    let status = unsafe { illposed_integrate(rhs, 0.0, 0.0, 0.2, 10, 7, &mut traj) };
    assert_eq!(status, IllposedStatus::InvalidArgument);
    unsafe {
        illposed_trajectory_free(traj);
        illposed_expr_free(rhs);
    }
}

#[test]
fn blowup_estimate_brackets_the_pole() {
    let rhs = parse("y^2 + 1");
    let mut r = std::mem::MaybeUninit::<IllposedBlowupResult>::uninit();
    let status = unsafe {
        illposed_blowup_estimate(rhs, 0.0, 0.0, 2.0, 0.0, 0.0, 0, 0.0, true, r.as_mut_ptr())
    };
    assert_eq!(status, IllposedStatus::Ok);
    let r = unsafe { r.assume_init() };
    assert_eq!(r.verdict, IllposedBlowupVerdict::BlowupDetected);
    let pole = std::f64::consts::FRAC_PI_2;
    assert!(r.bracket_lo <= pole && pole <= r.bracket_hi);
    assert!(r.bracket_hi - r.bracket_lo <= 0.05);
    unsafe { illposed_expr_free(rhs) };
}

#[test]
fn cooling_fit_and_range() {
    let mut fit = std::mem::MaybeUninit::<IllposedCoolingFit>::uninit();
    let status = unsafe { illposed_cooling_fit(0.5, 70.0, 40.0, 30.0, -273.15, fit.as_mut_ptr()) };
    assert_eq!(status, IllposedStatus::Ok);
    let fit = unsafe { fit.assume_init() };
    assert_eq!(fit.verdict, IllposedCoolingVerdict::Feasible);
    assert!(fit.has_params);
    assert!((fit.t_m - 25.0).abs() < 1e-9);
    assert!((fit.k - 2.0 * (1.0f64 / 3.0).ln()).abs() < 1e-9);

    let mut fit = std::mem::MaybeUninit::<IllposedCoolingFit>::uninit();
    unsafe { illposed_cooling_fit(0.5, 70.0, 50.0, 30.0, -273.15, fit.as_mut_ptr()) };
    let fit = unsafe { fit.assume_init() };
    assert_eq!(fit.verdict, IllposedCoolingVerdict::ColinearDegenerate);
    assert!(!fit.has_params && fit.t_m.is_nan());

    let (mut lo, mut hi) = (0.0, 0.0);
    let status = unsafe { illposed_cooling_range(70.0, 30.0, -273.15, &mut lo, &mut hi) };
    assert_eq!(status, IllposedStatus::Ok);
    assert_eq!(lo, 30.0);
    assert!(hi > 49.0 && hi < 50.0);
}

#[test]
fn recurrence_helpers() {
    assert!((illposed_recurrence_limit(0.0, 1.0) - 2.0 / 3.0).abs() < 1e-15);
    assert!((illposed_recurrence_closed_form(0.0, 1.0, 3) - 0.75).abs() < 1e-12);
}

#[test]
fn header_declares_every_export() {
    let header = Path::new(env!("CARGO_MANIFEST_DIR")).join("include/illposed.h");
    let text = std::fs::read_to_string(&header).expect("generated header");
    for sym in [
        "illposed_last_error",
        "illposed_expr_parse",
        "illposed_expr_eval",
        "illposed_expr_free",
        "illposed_integrate",
        "illposed_trajectory_len",
        "illposed_trajectory_point",
        "illposed_trajectory_terminated_early",
        "illposed_trajectory_free",
        "illposed_blowup_estimate",
        "illposed_cooling_fit",
        "illposed_cooling_range",
        "illposed_recurrence_closed_form",
        "illposed_recurrence_limit",
        "typedef struct IllposedExpr IllposedExpr;",
        "ILLPOSED_STATUS_PARSE_ERROR = 3",
        "ILLPOSED_METHOD_RK4 = 1",
    ] {
        assert!(text.contains(sym), "header lacks {sym}");
    }
}

#[test]
fn header_compiles_as_c() {
    let header = Path::new(env!("CARGO_MANIFEST_DIR")).join("include/illposed.h");
    let probe = std::process::Command::new("cc").arg("--version").output();
    if probe.is_err() {
        eprintln!("no C compiler; skipping");
        return;
    }
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("probe.c");
    std::fs::write(
        &src,
        format!(
            "#include \"{}\"\nint main(void) {{ return 0; }}\n",
            header.display()
        ),
    )
    .unwrap();
    let out = std::process::Command::new("cc")
        .args(["-std=c99", "-Wall", "-Werror", "-fsyntax-only"])
        .arg(&src)
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
}
