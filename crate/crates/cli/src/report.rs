use std::fs;
use std::path::{Path, PathBuf};

use anyhow::Context;
use serde::Serialize;

use crate::config::TableFormat;

/// Pretty JSON with a trailing newline.
pub fn write_json<T: Serialize>(dir: &Path, name: &str, value: &T) -> anyhow::Result<PathBuf> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let path = dir.join(name);
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
    Ok(path)
}

#[derive(Serialize)]
struct JsonTable<'a> {
    columns: &'a [&'a str],
    rows: &'a [Vec<f64>],
}

/// Writes `<stem>.csv` (header row, ',' delimiter) or `<stem>.json`
/// (`{"columns": [...], "rows": [[...]]}`).
pub fn write_table(
    dir: &Path,
    stem: &str,
    columns: &[&str],
    rows: &[Vec<f64>],
    format: TableFormat,
) -> anyhow::Result<PathBuf> {
    match format {
        TableFormat::Json => write_json(dir, &format!("{stem}.json"), &JsonTable { columns, rows }),
        TableFormat::Csv => {
            fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
            let path = dir.join(format!("{stem}.csv"));
            let mut text = columns.join(",");
            text.push('\n');
            for row in rows {
                let cells: Vec<String> = row.iter().map(|v| format_cell(*v)).collect();
                text.push_str(&cells.join(","));
                text.push('\n');
            }
            fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
            Ok(path)
        }
    }
}

/// Shortest round-trip text; scientific notation outside [1e-4, 1e7).
fn format_cell(v: f64) -> String {
    let mag = v.abs();
    if v == 0.0 || (1e-4..1e7).contains(&mag) || !v.is_finite() {
        v.to_string()
    } else {
        format!("{v:e}")
    }
}
