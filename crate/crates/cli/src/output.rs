use num_complex::Complex64;
use serde_json::{json, Value};

use crate::config::Settings;

/// Twelve significant digits in scientific notation; `-0` prints as `0`.
pub fn num(x: f64) -> String {
    let x = if x == 0.0 { 0.0 } else { x };
    format!("{x:.11e}")
}

/// `x` rounded to twelve significant digits, as a JSON number (`null` if not finite).
pub fn r12(x: f64) -> Value {
    if !x.is_finite() {
        return Value::Null;
    }
    let rounded: f64 = num(x).parse().expect("formatted float parses");
    json!(rounded)
}

pub fn complex(z: Complex64) -> Value {
    json!({ "re": r12(z.re), "im": r12(z.im) })
}

/// Comment block that precedes every CSV table.
pub fn csv_header(command: &str, settings: &Settings, notes: &[String], columns: &[&str]) -> String {
    let mut out = format!("# susy-feshbach {command}\n");
    out += &format!("# config: {}\n", settings.echo());
    out += &format!("# model: {}\n", settings.model_summary());
    for note in notes {
        out += &format!("# note: {note}\n");
    }
    out += &columns.join(",");
    out.push('\n');
    out
}

/// A CSV row; `None` becomes an empty field.
pub fn csv_row(fields: &[Option<String>]) -> String {
    let mut line = fields
        .iter()
        .map(|f| f.as_deref().unwrap_or(""))
        .collect::<Vec<_>>()
        .join(",");
    line.push('\n');
    line
}

/// JSON document for a table, carrying the same metadata as the CSV header.
pub fn json_table(command: &str, settings: &Settings, notes: &[String], columns: &[&str], rows: Vec<Vec<Value>>) -> String {
    let doc = json!({
        "command": command,
        "config": settings.echo(),
        "model": settings.model_summary(),
        "notes": notes,
        "columns": columns,
        "rows": rows,
    });
    pretty(&doc)
}

pub fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("values are serializable");
    s.push('\n');
    s
}
