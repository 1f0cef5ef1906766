//! Comma-separated result tables.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use qrev_core::analysis::ErrorRecord;

use crate::error::CliError;

pub const RESULTS_HEADER: &str = "eps,gamma,t,err_l2,err_h1tail,err_lr,bound,t_eps";

/// Shortest round-trip representation; `inf`/`NaN` spelled as Rust prints them.
pub fn num(v: f64) -> String {
    format!("{v:e}")
}

pub fn render_results(rows: &[ErrorRecord]) -> String {
    let mut s = String::from(RESULTS_HEADER);
    s.push('\n');
    for r in rows {
        let cols = [
            r.eps,
            r.gamma,
            r.t,
            r.err_l2,
            r.err_h1_tail,
            r.err_lr,
            r.bound,
            r.t_eps,
        ];
        let line: Vec<String> = cols.iter().map(|v| num(*v)).collect();
        s.push_str(&line.join(","));
        s.push('\n');
    }
    s
}

pub fn parse_results(text: &str) -> Result<Vec<ErrorRecord>, String> {
    let mut lines = text.lines();
    if lines.next() != Some(RESULTS_HEADER) {
        return Err("unexpected header".into());
    }
    lines
        .enumerate()
        .map(|(i, l)| {
            let v: Vec<f64> = l
                .split(',')
                .map(|c| c.parse::<f64>())
                .collect::<Result<_, _>>()
                .map_err(|e| format!("row {}: {e}", i + 1))?;
            if v.len() != 8 {
                return Err(format!("row {}: {} columns", i + 1, v.len()));
            }
            Ok(ErrorRecord {
                eps: v[0],
                gamma: v[1],
                t: v[2],
                err_l2: v[3],
                err_h1_tail: v[4],
                err_lr: v[5],
                bound: v[6],
                t_eps: v[7],
            })
        })
        .collect()
}

/// Generic table: header columns and rows of already formatted cells.
pub fn render(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut s = header.join(",");
    s.push('\n');
    for r in rows {
        let _ = writeln!(s, "{}", r.join(","));
    }
    s
}

pub fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|e| CliError::io(path, e))
}
