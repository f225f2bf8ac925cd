//! Plain-text instance files.
//!
//! ```text
//! N M
//! # name: <name>
//! # offset: <real>
//! i j w        (M lines, 1-based, i <= j)
//! ```
//!
//! Line 1 is the header. `#` lines are comments and may appear anywhere; the
//! `name:` and `offset:` comments are read back. Weights are written with the
//! shortest decimal that round-trips, lines end with LF.

use std::collections::HashSet;
use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::instances::{classify, InstanceMetadata};
use crate::model::{QuboEntry, QuboProblem};

const NAME_KEY: &str = "name:";
const OFFSET_KEY: &str = "offset:";

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse { line, message: message.into() }
}

/// Parses an instance; the name comes from a `# name:` comment when present.
pub fn parse_mqlib(text: &str) -> Result<(QuboProblem, InstanceMetadata)> {
    let mut name = String::new();
    let mut offset = 0.0;
    let mut header: Option<(usize, usize)> = None;
    let mut entries = Vec::new();
    let mut seen = HashSet::new();
    let mut last_line = 0;

    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        last_line = lineno;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(comment) = line.strip_prefix('#') {
            let comment = comment.trim();
            if let Some(v) = comment.strip_prefix(NAME_KEY) {
                name = v.trim().to_string();
            } else if let Some(v) = comment.strip_prefix(OFFSET_KEY) {
                offset = v
                    .trim()
                    .parse::<f64>()
                    .map_err(|e| parse_err(lineno, format!("bad offset: {e}")))?;
            }
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        let Some((n, m)) = header else {
            if fields.len() != 2 {
                return Err(parse_err(lineno, "expected header `N M`"));
            }
            let n = fields[0].parse().map_err(|e| parse_err(lineno, format!("bad N: {e}")))?;
            let m = fields[1].parse().map_err(|e| parse_err(lineno, format!("bad M: {e}")))?;
            header = Some((n, m));
            entries.reserve(m);
            continue;
        };
        if fields.len() != 3 {
            return Err(parse_err(lineno, "expected `i j w`"));
        }
        if seen.len() == m {
            return Err(parse_err(lineno, format!("more than the {m} declared entries")));
        }
        let i: usize = fields[0].parse().map_err(|e| parse_err(lineno, format!("bad i: {e}")))?;
        let j: usize = fields[1].parse().map_err(|e| parse_err(lineno, format!("bad j: {e}")))?;
        let w: f64 = fields[2].parse().map_err(|e| parse_err(lineno, format!("bad w: {e}")))?;
        if i == 0 || j == 0 || i > n || j > n {
            return Err(Error::Validation(format!(
                "line {lineno}: index out of range 1..={n}: ({i}, {j})"
            )));
        }
        if !w.is_finite() {
            return Err(parse_err(lineno, "weight is not finite"));
        }
        let (i, j) = (i.min(j) - 1, i.max(j) - 1);
        if !seen.insert((i, j)) {
            return Err(Error::Validation(format!(
                "line {lineno}: duplicate pair ({}, {})",
                i + 1,
                j + 1
            )));
        }
        entries.push(QuboEntry { i, j, q: w });
    }

    let Some((n, m)) = header else {
        return Err(parse_err(last_line.max(1), "missing header"));
    };
    if seen.len() != m {
        return Err(parse_err(
            last_line.max(1),
            format!("declared {m} entries, found {}", seen.len()),
        ));
    }
    let problem = QuboProblem::new(n, entries, offset)?;
    let meta = classify(&problem, &name);
    Ok((problem, meta))
}

/// Reads a file; falls back to the file stem when it carries no name.
pub fn load_mqlib(path: impl AsRef<Path>) -> Result<(QuboProblem, InstanceMetadata)> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)?;
    let (p, mut meta) = parse_mqlib(&text)?;
    if meta.name.is_empty() {
        meta.name = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default();
    }
    Ok((p, meta))
}

/// Canonical text form; inverse of [`parse_mqlib`].
pub fn write_mqlib(p: &QuboProblem, name: &str) -> String {
    let mut out = String::with_capacity(24 * (p.entries().len() + 2));
    writeln!(out, "{} {}", p.num_vars(), p.entries().len()).unwrap();
    if !name.is_empty() {
        writeln!(out, "# {NAME_KEY} {name}").unwrap();
    }
    if p.offset() != 0.0 {
        writeln!(out, "# {OFFSET_KEY} {}", p.offset()).unwrap();
    }
    for e in p.entries() {
        writeln!(out, "{} {} {}", e.i + 1, e.j + 1, e.q).unwrap();
    }
    out
}
