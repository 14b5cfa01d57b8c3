//! Deterministic report serialisation.
//!
//! Keys are emitted in sorted order and every float is rounded to 15
//! significant digits, so identical runs produce identical documents apart
//! from `wall_time`.

use std::fmt::Write;

use serde_json::{Map, Number, Value};

use crate::commands::Report;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Text,
}

/// Rounds to 15 significant digits. Such a decimal survives the round trip
/// through `f64`, so the shortest representation has at most 15 digits.
pub fn round_sig15(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{x:.14e}").parse().expect("formatted float parses")
}

fn normalise(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = round_sig15(n.as_f64().expect("f64 number"));
            Number::from_f64(x).map_or(Value::Null, Value::Number)
        }
        Value::Array(a) => Value::Array(a.into_iter().map(normalise).collect()),
        Value::Object(o) => Value::Object(o.into_iter().map(|(k, v)| (k, normalise(v))).collect::<Map<_, _>>()),
        other => other,
    }
}

pub fn report_value(report: &Report) -> Value {
    normalise(serde_json::to_value(report).expect("report serialises"))
}

fn scalar(v: &Value) -> Option<String> {
    match v {
        Value::Null => Some("null".into()),
        Value::Bool(b) => Some(b.to_string()),
        Value::Number(n) => Some(n.to_string()),
        Value::String(s) => Some(s.clone()),
        Value::Array(a) => {
            let items: Option<Vec<String>> = a.iter().map(scalar).collect();
            items.map(|v| format!("[{}]", v.join(", ")))
        }
        Value::Object(_) => None,
    }
}

fn render(out: &mut String, key: &str, v: &Value, depth: usize) {
    let pad = "  ".repeat(depth);
    if let Some(s) = scalar(v) {
        let _ = writeln!(out, "{pad}{key}: {s}");
        return;
    }
    let _ = writeln!(out, "{pad}{key}:");
    match v {
        Value::Object(o) => o.iter().for_each(|(k, x)| render(out, k, x, depth + 1)),
        Value::Array(a) => a.iter().enumerate().for_each(|(i, x)| render(out, &format!("[{i}]"), x, depth + 1)),
        _ => unreachable!("scalars handled above"),
    }
}

pub fn emit_report(report: &Report, format: Format) -> String {
    let v = report_value(report);
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&v).expect("value serialises");
            s.push('\n');
            s
        }
        Format::Text => {
            let mut s = String::new();
            if let Value::Object(o) = &v {
                o.iter().for_each(|(k, x)| render(&mut s, k, x, 0));
            }
            s
        }
    }
}
