//! JSON report helpers.

use std::io::Write;
use std::path::Path;

use serde::{Serialize, Serializer};

use crate::error::{CliError, Result};

pub const SCHEMA: u32 = 1;

/// A score in decibels; `+inf` is written as the string `"inf"`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Db(pub f64);

impl Serialize for Db {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self.0 {
            v if v.is_finite() => s.serialize_f64(v),
            v if v == f64::INFINITY => s.serialize_str("inf"),
            v if v == f64::NEG_INFINITY => s.serialize_str("-inf"),
            _ => s.serialize_none(),
        }
    }
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("report types serialize")
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    std::fs::write(path, to_json(value) + "\n").map_err(|e| CliError::io(path, e))
}

/// Print a line to stdout. A closed pipe (e.g. `| head`) is not an error.
pub fn print_line(text: &str) {
    let mut out = std::io::stdout().lock();
    let _ = writeln!(out, "{text}").and_then(|_| out.flush());
}

/// Print to stdout and optionally mirror to a file.
pub fn emit<T: Serialize>(value: &T, path: Option<&Path>) -> Result<()> {
    print_line(&to_json(value));
    if let Some(p) = path {
        write_json(p, value)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn infinite_scores_become_strings() {
        let v = serde_json::to_value([Db(f64::INFINITY), Db(31.5), Db(f64::NAN)]).unwrap();
        assert_eq!(v, serde_json::json!(["inf", 31.5, null]));
    }
}
