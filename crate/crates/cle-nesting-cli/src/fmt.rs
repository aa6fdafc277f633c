//! Output plumbing: format selection, float rendering at a declared
//! precision, and the stdout-or-file writer.

use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;

use clap::ValueEnum;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// Where and how a command writes its table.
#[derive(Clone, Debug)]
pub struct OutputSpec {
    pub format: Format,
    pub path: Option<PathBuf>,
    pub precision: u8,
}

/// Renders `v` with `precision` significant digits: fixed-point notation in
/// the human range, scientific outside it, so values of any magnitude parse
/// back to exactly the digits shown.
pub fn fmt_float(v: f64, precision: u8) -> String {
    let p = precision.clamp(1, 17) as usize;
    if v == 0.0 {
        return "0".to_string();
    }
    if !v.is_finite() {
        return if v.is_nan() {
            "nan".to_string()
        } else if v > 0.0 {
            "inf".to_string()
        } else {
            "-inf".to_string()
        };
    }
    let mag = v.abs().log10().floor() as i32;
    if (-4..6).contains(&mag) {
        let decimals = (p as i32 - 1 - mag).max(0) as usize;
        format!("{v:.decimals$}")
    } else {
        format!("{v:.*e}", p - 1)
    }
}

/// Rounds `v` to `precision` significant digits; used to build JSON numbers
/// that print exactly as many digits as the declared precision carries.
pub fn sig_round(v: f64, precision: u8) -> f64 {
    if !v.is_finite() || v == 0.0 {
        return v;
    }
    let p = precision.clamp(1, 17) as usize;
    format!("{v:.*e}", p - 1).parse().unwrap_or(v)
}

/// JSON value for a float: a number when finite, a marker string otherwise.
pub fn json_number(v: f64, precision: u8) -> serde_json::Value {
    if v.is_nan() {
        serde_json::Value::String("nan".into())
    } else if v.is_infinite() {
        serde_json::Value::String(if v > 0.0 { "inf" } else { "-inf" }.into())
    } else {
        serde_json::Number::from_f64(sig_round(v, precision))
            .map(serde_json::Value::Number)
            .unwrap_or_else(|| serde_json::Value::String("nan".into()))
    }
}

/// Writes `content` to the spec's path, or stdout when none is given.
pub fn write_out(path: &Option<PathBuf>, content: &str) -> io::Result<()> {
    match path {
        Some(p) => fs::write(p, content),
        None => io::stdout().write_all(content.as_bytes()),
    }
}
