//! Result tables: CSV or JSON files with a formula header, and aligned text.

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::args::Format;
use crate::CliError;

/// 17 significant digits, enough to round-trip any `f64`.
pub fn full(x: f64) -> String {
    format!("{x:.16e}")
}

fn short(x: f64) -> String {
    if x.is_finite() && x != 0.0 && (x.abs() < 1e-4 || x.abs() >= 1e6) {
        format!("{x:.4e}")
    } else {
        format!("{x:.6}")
    }
}

pub trait Record {
    const COLUMNS: &'static [&'static str];
    /// Field values with floats rendered by `float`.
    fn fields(&self, float: &dyn Fn(f64) -> String) -> Vec<String>;
}

/// JSON layout of a table.
#[derive(Debug, Serialize, Deserialize)]
pub struct JsonTable<T> {
    pub formula: String,
    pub rows: T,
}

pub fn render<R: Record + Serialize>(formula: &str, rows: &[R], format: Format) -> Result<Vec<u8>, CliError> {
    let mut buf = Vec::new();
    match format {
        Format::Csv => {
            writeln!(buf, "# {formula}").expect("writing to memory");
            let mut w = csv::Writer::from_writer(&mut buf);
            let encode = |e: csv::Error| CliError::Usage(format!("CSV encoding: {e}"));
            w.write_record(R::COLUMNS).map_err(encode)?;
            for row in rows {
                w.write_record(row.fields(&full)).map_err(encode)?;
            }
            w.flush().expect("writing to memory");
        }
        Format::Json => {
            let table = JsonTable { formula: formula.to_string(), rows };
            serde_json::to_writer_pretty(&mut buf, &table).expect("rows serialize");
            buf.push(b'\n');
        }
    }
    Ok(buf)
}

/// Write to `out`, or to stdout without a path.
pub fn emit<R: Record + Serialize>(
    formula: &str,
    rows: &[R],
    format: Format,
    out: Option<&Path>,
) -> Result<(), CliError> {
    let bytes = render(formula, rows, format)?;
    match out {
        Some(path) => std::fs::write(path, bytes).map_err(|e| CliError::io(path, e)),
        None => std::io::stdout().write_all(&bytes).map_err(|e| CliError::io(Path::new("<stdout>"), e)),
    }
}

pub fn aligned<R: Record>(rows: &[R]) -> String {
    let cells: Vec<Vec<String>> = rows.iter().map(|r| r.fields(&short)).collect();
    let widths: Vec<usize> = R::COLUMNS
        .iter()
        .enumerate()
        .map(|(i, h)| cells.iter().map(|c| c[i].len()).chain([h.len()]).max().unwrap_or(0))
        .collect();
    let line = |items: Vec<&str>| {
        items
            .iter()
            .zip(&widths)
            .map(|(s, w)| format!("{s:>w$}"))
            .collect::<Vec<_>>()
            .join("  ")
    };
    let mut text = line(R::COLUMNS.to_vec());
    text.push('\n');
    for c in &cells {
        text.push_str(&line(c.iter().map(String::as_str).collect()));
        text.push('\n');
    }
    text
}

/// Missing values render as empty fields.
pub fn opt(x: Option<f64>, float: &dyn Fn(f64) -> String) -> String {
    x.map(float).unwrap_or_default()
}
