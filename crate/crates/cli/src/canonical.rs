//! Canonical JSON: sorted keys, floats at 17 significant digits.
//!
//! `serde_json::Map` keeps keys sorted without the `preserve_order`
//! feature; this module only fixes the number formatting and the layout.

use serde_json::{Number, Value};

/// 17 significant digits in scientific notation; round-trips every `f64`.
pub fn float(x: f64) -> String {
    if x == 0.0 {
        // one spelling for both zeros
        return "0.0000000000000000e0".into();
    }
    format!("{x:.16e}")
}

/// A JSON number, or a string tag for values JSON cannot carry.
pub fn num(x: f64) -> Value {
    if x.is_finite() {
        Value::Number(Number::from_f64(x).expect("finite"))
    } else if x.is_nan() {
        Value::String("nan".into())
    } else if x > 0.0 {
        Value::String("inf".into())
    } else {
        Value::String("-inf".into())
    }
}

pub fn to_string(v: &Value) -> String {
    let mut out = String::new();
    write(v, 0, &mut out);
    out.push('\n');
    out
}

fn write(v: &Value, depth: usize, out: &mut String) {
    let pad = |out: &mut String, d: usize| {
        out.push('\n');
        out.extend(std::iter::repeat_n("  ", d));
    };
    match v {
        Value::Null | Value::Bool(_) | Value::String(_) => out.push_str(&v.to_string()),
        Value::Number(n) => match (n.as_i64(), n.as_u64()) {
            (Some(i), _) => out.push_str(&i.to_string()),
            (_, Some(u)) => out.push_str(&u.to_string()),
            _ => out.push_str(&float(n.as_f64().expect("number"))),
        },
        Value::Array(items) if items.is_empty() => out.push_str("[]"),
        Value::Array(items) => {
            out.push('[');
            for (i, item) in items.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                pad(out, depth + 1);
                write(item, depth + 1, out);
            }
            pad(out, depth);
            out.push(']');
        }
        Value::Object(map) if map.is_empty() => out.push_str("{}"),
        Value::Object(map) => {
            out.push('{');
            for (i, (k, item)) in map.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                pad(out, depth + 1);
                out.push_str(&Value::String(k.clone()).to_string());
                out.push_str(": ");
                write(item, depth + 1, out);
            }
            pad(out, depth);
            out.push('}');
        }
    }
}
