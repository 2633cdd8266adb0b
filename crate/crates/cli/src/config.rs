//! `--config FILE`: `key = value` lines giving defaults for long flags.
//!
//! Keys are flag names without the leading dashes. Flags given on the
//! command line win. `key = true` adds a bare switch, `key = false` is
//! ignored. Blank lines and `#` comments are skipped.

use std::path::Path;

use crate::error::{CliError, CliResult};

pub fn parse(text: &str) -> CliResult<Vec<(String, String)>> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("config line {}: expected key = value", i + 1)))?;
        let key = k.trim().trim_start_matches("--").replace('_', "-");
        if key.is_empty() {
            return Err(CliError::Usage(format!("config line {}: empty key", i + 1)));
        }
        out.push((key, v.trim().to_string()));
    }
    Ok(out)
}

/// Finds `--config PATH` or `--config=PATH` anywhere in the arguments.
pub fn config_path(argv: &[String]) -> Option<String> {
    let mut iter = argv.iter();
    while let Some(a) = iter.next() {
        if a == "--config" {
            return iter.next().cloned();
        }
        if let Some(p) = a.strip_prefix("--config=") {
            return Some(p.to_string());
        }
    }
    None
}

/// Appends config entries whose flags are absent from `argv`.
pub fn merge(argv: &[String]) -> CliResult<Vec<String>> {
    let Some(path) = config_path(argv) else {
        return Ok(argv.to_vec());
    };
    let text = std::fs::read_to_string(&path).map_err(|e| CliError::io(Path::new(&path), e))?;
    let mut merged = argv.to_vec();
    for (key, value) in parse(&text)? {
        let flag = format!("--{key}");
        let present = argv.iter().any(|a| a == &flag || a.starts_with(&format!("{flag}=")));
        if present {
            continue;
        }
        match value.as_str() {
            "true" => merged.push(flag),
            "false" => {}
            _ => {
                merged.push(flag);
                merged.push(value);
            }
        }
    }
    Ok(merged)
}
