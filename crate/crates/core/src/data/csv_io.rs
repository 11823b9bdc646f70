use std::fs::File;
use std::io::Write;
use std::path::Path;

use super::Sample;
use crate::{Error, Result};

fn open(path: &Path) -> Result<File> {
    File::open(path).map_err(|e| match e.kind() {
        std::io::ErrorKind::NotFound => Error::FileNotFound {
            path: path.to_path_buf(),
        },
        _ => Error::Io(e),
    })
}

/// Reads rows of exactly `width` numbers.
///
/// The first row is taken as a header when it contains a non-numeric field and
/// the row after it parses; a lone non-numeric row is a parse error.
pub fn read_numeric_rows(path: &Path, width: usize) -> Result<Vec<Vec<f64>>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(open(path)?);

    let mut records = Vec::new();
    for rec in reader.records() {
        let rec = rec?;
        let line = rec.position().map_or(0, |p| p.line());
        if rec.iter().all(str::is_empty) {
            continue;
        }
        records.push((line, rec));
    }

    let parse = |line: u64, rec: &csv::StringRecord| -> Result<Vec<f64>> {
        if rec.len() != width {
            return Err(Error::Parse {
                path: path.to_path_buf(),
                line,
                message: format!("expected {width} fields, found {}", rec.len()),
            });
        }
        rec.iter()
            .enumerate()
            .map(|(i, field)| {
                field.parse::<f64>().map_err(|_| Error::Parse {
                    path: path.to_path_buf(),
                    line,
                    message: format!("field {} is not a number: `{field}`", i + 1),
                })
            })
            .collect()
    };

    let mut start = 0;
    if let [(line0, first), (line1, second), ..] = records.as_slice() {
        if parse(*line0, first).is_err() && parse(*line1, second).is_ok() {
            log::debug!("{}: treating line {line0} as a header", path.display());
            start = 1;
        }
    }
    let rows = records[start..]
        .iter()
        .map(|(line, rec)| parse(*line, rec))
        .collect::<Result<Vec<_>>>()?;
    if rows.is_empty() {
        log::warn!("{}: no data rows", path.display());
    } else {
        log::info!("{}: read {} rows", path.display(), rows.len());
    }
    Ok(rows)
}

/// Loads `(x, y)` pairs from a CSV whose rows hold `d1` inputs then `d2` outputs.
pub fn load_csv(path: &Path, d1: usize, d2: usize) -> Result<Vec<Sample>> {
    if d1 == 0 {
        return Err(Error::InvalidArgument("input width must be positive".into()));
    }
    Ok(read_numeric_rows(path, d1 + d2)?
        .into_iter()
        .map(|mut row| {
            let y = row.split_off(d1);
            Sample { x: row, y }
        })
        .collect())
}

/// Writes samples with an `x1..,y1..` header.
pub fn write_samples(path: &Path, samples: &[Sample]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    if let Some(first) = samples.first() {
        let header: Vec<String> = (1..=first.x.len())
            .map(|i| format!("x{i}"))
            .chain((1..=first.y.len()).map(|i| format!("y{i}")))
            .collect();
        w.write_record(&header)?;
    }
    for s in samples {
        w.write_record(s.x.iter().chain(&s.y).map(|v| format_float(*v)))?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_rows(path: &Path, header: &[&str], rows: &[Vec<f64>]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(header)?;
    for r in rows {
        w.write_record(r.iter().map(|v| format_float(*v)))?;
    }
    w.flush()?;
    Ok(())
}

/// Shortest representation that parses back to the same `f64`.
pub fn format_float(v: f64) -> String {
    format!("{v:?}")
}

pub(crate) fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut f = File::create(path)?;
    serde_json::to_writer_pretty(&mut f, value)?;
    f.write_all(b"\n")?;
    Ok(())
}
