//! Report envelope: every emitted JSON document carries the tool version and
//! the fully resolved configuration that produced it.

use serde::Serialize;
use std::error::Error;
use std::path::Path;

#[derive(Serialize)]
pub struct Report<C: Serialize, B: Serialize> {
    pub tool: &'static str,
    pub version: &'static str,
    pub config: C,
    #[serde(flatten)]
    pub body: B,
}

pub fn envelope<C: Serialize, B: Serialize>(config: C, body: B) -> Report<C, B> {
    Report {
        tool: "charpde",
        version: env!("CARGO_PKG_VERSION"),
        config,
        body,
    }
}

/// Write JSON to a file, or pretty-print to stdout when no path is given.
pub fn emit_json<T: Serialize>(value: &T, path: Option<&Path>) -> Result<(), Box<dyn Error>> {
    let text = serde_json::to_string_pretty(value)?;
    match path {
        Some(p) => std::fs::write(p, text + "\n")?,
        None => println!("{text}"),
    }
    Ok(())
}

/// RFC 4180 CSV writer: rows of plain fields (no quoting needed for numeric
/// output).
pub fn write_csv(
    path: &Path,
    header: &[&str],
    rows: impl Iterator<Item = Vec<String>>,
) -> std::io::Result<()> {
    let mut out = String::new();
    out.push_str(&header.join(","));
    out.push_str("\r\n");
    for row in rows {
        out.push_str(&row.join(","));
        out.push_str("\r\n");
    }
    std::fs::write(path, out)
}
