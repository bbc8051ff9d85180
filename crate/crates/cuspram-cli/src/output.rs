//! Report emission. Every report renders as text, CSV or JSON through one writer.

use std::fs;
use std::io::Write;

use clap::ValueEnum;
use serde::Serialize;

use crate::{Common, Failure};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Csv,
    Json,
}

pub trait Render: Serialize {
    fn text(&self) -> String;

    /// Flat rows for CSV output.
    fn csv(&self) -> Result<String, Failure>;
}

/// Serialize flat records with a header line.
pub fn csv_rows<T: Serialize>(rows: &[T]) -> Result<String, Failure> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).map_err(|e| Failure::usage(format!("csv: {e}")))?;
    }
    let bytes = w.into_inner().map_err(|e| Failure::usage(format!("csv: {e}")))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

pub fn to_json<T: Serialize>(r: &T) -> Result<String, Failure> {
    let mut s = serde_json::to_string_pretty(r).map_err(|e| Failure::usage(format!("json: {e}")))?;
    s.push('\n');
    Ok(s)
}

pub fn emit<R: Render>(report: &R, c: &Common) -> Result<(), Failure> {
    let body = match c.format {
        Format::Text => report.text(),
        Format::Csv => report.csv()?,
        Format::Json => to_json(report)?,
    };
    match &c.out {
        Some(path) => fs::write(path, body)?,
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(body.as_bytes())?;
            out.flush()?;
        }
    }
    Ok(())
}
