use serde::Serialize;
use serde_json::{Number, Value};

/// Significant digits for floats in JSON output.
pub const JSON_DIGITS: usize = 12;

fn round_sig(x: f64, digits: usize) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{:.*e}", digits - 1, x).parse().unwrap_or(x)
}

/// Rounds every non-integer number in `v` to `digits` significant digits.
pub fn round_floats(v: &mut Value, digits: usize) {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = round_sig(n.as_f64().expect("f64 number"), digits);
            // -0.0 prints as "-0.0"; keep zeros unsigned
            let x = if x == 0.0 { 0.0 } else { x };
            *n = Number::from_f64(x).expect("finite after rounding");
        }
        Value::Array(items) => items.iter_mut().for_each(|i| round_floats(i, digits)),
        Value::Object(map) => map.values_mut().for_each(|i| round_floats(i, digits)),
        _ => {}
    }
}

/// Pretty JSON with floats rounded to [`JSON_DIGITS`], newline-terminated.
pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut v = serde_json::to_value(value).expect("reports serialize");
    round_floats(&mut v, JSON_DIGITS);
    let mut s = serde_json::to_string_pretty(&v).expect("value serializes");
    s.push('\n');
    s
}
