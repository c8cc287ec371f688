use serde_json::{Map, Value};

/// Significant digits kept in json reports.
pub const JSON_DIGITS: usize = 12;
/// Significant digits shown in human tables.
pub const HUMAN_DIGITS: usize = 6;

/// `x` rounded to `digits` significant digits; `-0` becomes `0`.
pub fn round_sig(x: f64, digits: usize) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return if x == 0.0 { 0.0 } else { x };
    }
    let r: f64 = format!("{:.*e}", digits - 1, x).parse().unwrap_or(x);
    if r == 0.0 {
        0.0
    } else {
        r
    }
}

/// `%g`-style text with `digits` significant digits and trailing zeros
/// dropped.
pub fn sig(x: f64, digits: usize) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let x = round_sig(x, digits);
    if x == 0.0 {
        return "0".into();
    }
    let exp = x.abs().log10().floor() as i32;
    if exp < -4 || exp >= digits as i32 {
        let s = format!("{:.*e}", digits - 1, x);
        let (mantissa, e) = s.split_once('e').unwrap();
        let mantissa = trim_zeros(mantissa);
        let e: i32 = e.parse().unwrap();
        format!("{mantissa}e{}{:02}", if e < 0 { '-' } else { '+' }, e.abs())
    } else {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{:.*}", decimals, x)).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Below this magnitude an O(1) physical quantity is reported as 0.
pub const ZERO_SNAP: f64 = 1e-12;

/// Maps rounding residue such as `-2.2e-16` to zero.
pub fn snap(x: f64) -> f64 {
    if x.abs() < ZERO_SNAP {
        0.0
    } else {
        x
    }
}

/// Human number, 6 significant digits.
pub fn h(x: f64) -> String {
    sig(x, HUMAN_DIGITS)
}

/// Json number at report precision; non-finite values become null.
/// Integral values print without a fractional part.
pub fn num(x: f64) -> Value {
    let r = round_sig(x, JSON_DIGITS);
    if r.fract() == 0.0 && r.abs() < 9.0e15 {
        return Value::from(r as i64);
    }
    serde_json::Number::from_f64(r)
        .map(Value::Number)
        .unwrap_or(Value::Null)
}

pub fn nums(xs: &[f64]) -> Value {
    Value::Array(xs.iter().map(|&x| num(x)).collect())
}

/// Builds an object from `(key, value)` pairs; keys end up sorted.
pub fn obj<const N: usize>(pairs: [(&str, Value); N]) -> Value {
    Value::Object(
        pairs
            .into_iter()
            .map(|(k, v)| (k.to_string(), v))
            .collect::<Map<_, _>>(),
    )
}

/// Pretty json with sorted keys and a trailing newline.
pub fn to_json(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json values serialize");
    s.push('\n');
    s
}

pub fn signs_text(signs: [i8; 4]) -> String {
    let s: Vec<&str> = signs
        .iter()
        .map(|&x| if x > 0 { "+" } else { "-" })
        .collect();
    format!("[{}]", s.join(","))
}
