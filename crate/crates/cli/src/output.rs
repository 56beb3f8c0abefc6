//! Number formatting and report serialization.

use std::fs;
use std::path::Path;

use serde::Serialize;

use crate::CliError;

/// Rounds to 12 significant digits so reports do not carry platform noise.
pub fn sig12(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return if x == 0.0 { 0.0 } else { x };
    }
    format!("{x:.11e}").parse().expect("scientific notation parses back")
}

pub fn sig12_opt(x: Option<f64>) -> Option<f64> {
    x.map(sig12)
}

fn fixed6(x: f64) -> String {
    let s = format!("{x:.6}");
    if s == "-0.000000" {
        "0.000000".to_string()
    } else {
        s
    }
}

/// `a+bi` with six decimals and no negative zeros.
pub fn complex_cell(re: f64, im: f64) -> String {
    let im_s = fixed6(im);
    match im_s.strip_prefix('-') {
        Some(abs) => format!("{}-{abs}i", fixed6(re)),
        None => format!("{}+{im_s}i", fixed6(re)),
    }
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report types serialize");
    s.push('\n');
    s
}

pub fn csv_string(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for row in rows {
        w.write_record(row).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv output is utf-8")
}

/// Writes to `path`, or stdout when absent.
pub fn emit(text: &str, path: Option<&Path>) -> Result<(), CliError> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| CliError::Io(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

pub fn cell(x: f64) -> String {
    sig12(x).to_string()
}
