//! Number formatting shared by every writer.

use serde_json::Value;

/// Shortest representation that parses back to the same `f64`; exponent
/// notation below 1e-4 keeps tiny p-values readable.
pub fn format_exact(x: f64) -> String {
    if x != 0.0 && x.abs() < 1e-4 {
        format!("{x:e}")
    } else {
        format!("{x}")
    }
}

/// `x` rounded to six significant digits.
pub fn round_sig6(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{x:.5e}").parse().unwrap_or(x)
}

/// Six significant digits, `%g` style.
pub fn format_sig6(x: f64) -> String {
    let r = round_sig6(x);
    if r != 0.0 && (r.abs() < 1e-4 || r.abs() >= 1e6) {
        format!("{r:e}")
    } else {
        format!("{r}")
    }
}

/// Rounds every float inside a JSON value to six significant digits.
pub fn round_json(value: &mut Value) {
    match value {
        Value::Number(n) if n.is_f64() => {
            if let Some(r) = n
                .as_f64()
                .map(round_sig6)
                .and_then(serde_json::Number::from_f64)
            {
                *n = r;
            }
        }
        Value::Array(items) => items.iter_mut().for_each(round_json),
        Value::Object(map) => map.values_mut().for_each(round_json),
        _ => {}
    }
}
