//! JSON report helpers. Reports never contain timings, so reruns with the
//! same config and seed are byte-identical.

use std::fs;
use std::io::Write;
use std::path::Path;

use serde::Serialize;
use serde_json::{json, Value};
use torsionlab_core::poly::Polynomial;
use torsionlab_core::{Complex64, Interval};

use crate::config::ExperimentConfig;
use crate::CliError;

/// Finite numbers as JSON numbers; infinities and NaN as `"inf"`, `"-inf"`
/// and `"nan"`.
pub fn num(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else if x.is_nan() {
        json!("nan")
    } else if x > 0.0 {
        json!("inf")
    } else {
        json!("-inf")
    }
}

pub fn interval(iv: &Interval) -> Value {
    if iv.is_empty() {
        return json!(null);
    }
    json!({ "lo": num(iv.lo), "hi": num(iv.hi), "lo_closed": iv.lo_closed, "hi_closed": iv.hi_closed })
}

pub fn complex(z: Complex64) -> Value {
    json!([num(z.re), num(z.im)])
}

pub fn poly(p: &Polynomial) -> Value {
    json!({ "expr": p.to_string(), "coeffs": p.coeffs().iter().map(|&c| num(c)).collect::<Vec<_>>() })
}

/// `{"command", "config", "result"}`.
pub fn envelope(command: &str, config: &ExperimentConfig, result: Value) -> Value {
    json!({ "command": command, "config": config, "result": result })
}

pub fn to_text<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("report values serialize");
    s.push('\n');
    s
}

/// Writes `name` into `dir` when given, else prints to stdout.
pub fn emit(dir: Option<&Path>, name: &str, text: &str) -> Result<(), CliError> {
    match dir {
        Some(dir) => {
            fs::create_dir_all(dir).map_err(|e| CliError::io(format!("cannot create {}: {e}", dir.display())))?;
            let path = dir.join(name);
            fs::write(&path, text).map_err(|e| CliError::io(format!("cannot write {}: {e}", path.display())))
        }
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()?;
            Ok(())
        }
    }
}
