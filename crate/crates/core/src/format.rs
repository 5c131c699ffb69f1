//! Number formatting shared by the CSV and JSON writers.

use serde_json::{Number, Value};

/// Formats like C's `%.17g`: 17 significant digits, trailing zeros removed,
/// exponent notation outside `1e-5 <= |v| < 1e17`. Parsing the result gives
/// back the same double.
pub fn g17(v: f64) -> String {
    if v.is_nan() {
        return "nan".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if v == 0.0 {
        return if v.is_sign_negative() {
            "-0".into()
        } else {
            "0".into()
        };
    }
    let sci = format!("{v:.16e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent marker");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-5..17).contains(&exp) {
        let mantissa = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        return format!("{mantissa}e{sign}{:02}", exp.abs());
    }
    let decimals = (16 - exp) as usize;
    trim_zeros(&format!("{v:.decimals$}")).to_string()
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Rounds to `digits` decimals for table presentation; `None` keeps full precision.
pub fn fixed(v: f64, round: Option<usize>) -> String {
    match round {
        Some(d) if v.is_finite() => {
            let s = format!("{v:.d$}");
            let t = trim_zeros(&s);
            if t == "-0" {
                "0".into()
            } else {
                t.to_string()
            }
        }
        _ => g17(v),
    }
}

/// A JSON number carrying the `%.17g` text verbatim; non-finite values become `null`.
pub fn json_num(v: f64) -> Value {
    if !v.is_finite() {
        return Value::Null;
    }
    let text = g17(v);
    let text = text.strip_prefix('-').map_or(text.clone(), |rest| {
        if rest == "0" {
            "0".to_string()
        } else {
            text.clone()
        }
    });
    Value::Number(
        text.parse::<Number>()
            .expect("g17 output is a valid JSON number"),
    )
}

pub fn json_opt(v: Option<f64>) -> Value {
    v.map_or(Value::Null, json_num)
}
