//! Number formatting for machine and human outputs.

use serde_json::Value;

/// Round-trip-safe CSV cell: 17 significant digits, `inf`/`-inf`/`nan` for
/// non-finite values.
pub fn csv_num(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        text(v).to_owned()
    }
}

/// Four significant digits for summaries.
pub fn human(v: f64) -> String {
    if !v.is_finite() {
        return text(v).to_owned();
    }
    if v == 0.0 {
        return "0".into();
    }
    let mag = v.abs().log10().floor() as i32;
    if (-4..6).contains(&mag) {
        let decimals = (3 - mag).max(0) as usize;
        format!("{v:.decimals$}")
    } else {
        format!("{v:.3e}")
    }
}

fn text(v: f64) -> &'static str {
    if v.is_nan() {
        "nan"
    } else if v > 0.0 {
        "inf"
    } else {
        "-inf"
    }
}

/// Extended real as JSON: a number when finite, otherwise the string
/// `"inf"` or `"-inf"`.
pub fn ext_real(v: f64) -> Value {
    if v.is_finite() {
        Value::from(v)
    } else {
        Value::from(text(v))
    }
}

/// Inverse of [`ext_real`].
pub fn parse_ext_real(v: &Value) -> Option<f64> {
    match v {
        Value::Number(n) => n.as_f64(),
        Value::String(s) => match s.as_str() {
            "inf" | "+inf" => Some(f64::INFINITY),
            "-inf" => Some(f64::NEG_INFINITY),
            _ => None,
        },
        _ => None,
    }
}
