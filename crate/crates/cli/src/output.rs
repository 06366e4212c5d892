//! Stable serialization and output routing.

use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::Value;

use crate::{CommonOut, Failure, Format, EXIT_OK, OUT_DIR_ENV};

/// Significant digits kept for every float in a report.
pub const SIG_DIGITS: usize = 12;

pub fn round_sig(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return if x == 0.0 { 0.0 } else { x };
    }
    let r: f64 = format!("{:.*e}", SIG_DIGITS - 1, x).parse().unwrap_or(x);
    if r == 0.0 {
        0.0
    } else {
        r
    }
}

/// Rounds all floats in place so reruns serialize byte-identically.
pub fn stabilize(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => {
            if let Some(x) = n.as_f64() {
                *v = serde_json::Number::from_f64(round_sig(x)).map_or(Value::Null, Value::Number);
            }
        }
        Value::Array(items) => items.iter_mut().for_each(stabilize),
        Value::Object(map) => map.values_mut().for_each(stabilize),
        _ => {}
    }
}

pub fn to_stable_value<T: Serialize>(x: &T) -> Value {
    let mut v = serde_json::to_value(x).expect("report types serialize");
    stabilize(&mut v);
    v
}

/// Pretty JSON with sorted keys and rounded floats, newline-terminated.
pub fn render_json(v: &Value) -> String {
    let mut v = v.clone();
    stabilize(&mut v);
    let mut s = serde_json::to_string_pretty(&v).expect("json values serialize");
    s.push('\n');
    s
}

fn resolve_path(out: &CommonOut, default_name: &str) -> Option<PathBuf> {
    if let Some(p) = &out.out {
        return Some(p.clone());
    }
    std::env::var_os(OUT_DIR_ENV).map(|dir| Path::new(&dir).join(default_name))
}

pub fn extension(format: Format) -> &'static str {
    match format {
        Format::Json => "json",
        Format::Csv => "csv",
        Format::Text => "txt",
    }
}

/// Writes `body` to `--out`, to `$DDGL2_OUT_DIR/<stem>.<ext>`, or to
/// stdout, in that order of preference.
pub fn emit(out: &CommonOut, stem: &str, body: &str) -> Result<(), Failure> {
    let name = format!("{stem}.{}", extension(out.format));
    match resolve_path(out, &name) {
        Some(path) => {
            if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
                std::fs::create_dir_all(parent).map_err(|e| Failure::io(format!("{}: {e}", parent.display())))?;
            }
            std::fs::write(&path, body).map_err(|e| Failure::io(format!("{}: {e}", path.display())))?;
            eprintln!("wrote {}", path.display());
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(body.as_bytes())
                .map_err(|e| Failure::io(format!("stdout: {e}")))?;
        }
    }
    Ok(())
}

pub fn csv_string(header: &[&str], rows: &[Vec<String>]) -> Result<String, Failure> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).map_err(|e| Failure::io(e.to_string()))?;
    for r in rows {
        w.write_record(r).map_err(|e| Failure::io(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| Failure::io(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

pub fn write_csv(path: &Path, header: &[&str], rows: &[Vec<String>]) -> Result<(), Failure> {
    let body = csv_string(header, rows)?;
    std::fs::write(path, body).map_err(|e| Failure::io(format!("{}: {e}", path.display())))
}

pub fn fmt_f(x: f64) -> String {
    format!("{:.6e}", x)
}

pub fn catalog(out: &CommonOut) -> Result<i32, Failure> {
    if out.format != Format::Json {
        return Err(Failure::usage("catalog export supports --format json only"));
    }
    let v = ddgl2::catalog::catalog_json().map_err(|e| Failure::io(e.to_string()))?;
    emit(out, "catalog", &render_json(&v))?;
    Ok(EXIT_OK)
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn rounding_is_idempotent_and_clears_negative_zero() {
        let x = 0.1 + 0.2;
        assert_eq!(round_sig(x), 0.3);
        assert_eq!(round_sig(round_sig(x)), round_sig(x));
        assert!(round_sig(-0.0).is_sign_positive());
        assert_eq!(round_sig(1.234_567_890_123_456e-20), 1.234_567_890_12e-20);
    }

    #[test]
    fn keys_are_sorted() {
        let s = render_json(&json!({"b": 1, "a": {"d": 0.30000000000000004, "c": 2}}));
        assert!(s.find("\"a\"").unwrap() < s.find("\"b\"").unwrap());
        assert!(s.find("\"c\"").unwrap() < s.find("\"d\"").unwrap());
        assert!(s.contains("0.3"));
        assert!(!s.contains("0.30000000000000004"));
    }

    #[test]
    fn csv_quotes_fields() {
        let s = csv_string(&["a", "b"], &[vec!["x,y".into(), "1".into()]]).unwrap();
        assert_eq!(s, "a,b\n\"x,y\",1\n");
    }
}
