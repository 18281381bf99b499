use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;

use anyhow::{Context, Result};
use serde::Serialize;

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    fs::write(path, text + "\n").with_context(|| format!("writing {}", path.display()))
}

pub fn write_jsonl<T: Serialize>(path: &Path, items: &[T]) -> Result<()> {
    let ctx = || format!("writing {}", path.display());
    let mut w = BufWriter::new(fs::File::create(path).with_context(ctx)?);
    for item in items {
        serde_json::to_writer(&mut w, item)?;
        w.write_all(b"\n").with_context(ctx)?;
    }
    w.flush().with_context(ctx)
}

pub fn write_csv<T: Serialize>(path: &Path, rows: &[T]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).with_context(|| format!("writing {}", path.display()))?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

fn fmt_opt(x: Option<f64>, digits: usize) -> String {
    x.map_or_else(|| "-".to_string(), |v| format!("{v:.digits$}"))
}

pub fn opt(x: Option<f64>) -> String {
    fmt_opt(x, 2)
}

pub fn opt3(x: Option<f64>) -> String {
    fmt_opt(x, 3)
}
