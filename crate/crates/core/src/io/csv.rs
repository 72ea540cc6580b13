//! CSV reading and writing for time series.
//!
//! Input is one or two numeric columns. A first line with no numeric field
//! is taken as a header. A single column gets times `0, 1, 2, ...`.

use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use tempfile::NamedTempFile;

use crate::error::{Error, Result};
use crate::series::TimeSeries;

pub fn read_csv(path: &Path) -> Result<TimeSeries> {
    let file = File::open(path).map_err(|source| Error::Io { path: path.to_path_buf(), source })?;
    parse_csv(file)
}

pub fn parse_csv<R: Read>(reader: R) -> Result<TimeSeries> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(reader);

    let mut times = Vec::new();
    let mut values = Vec::new();
    let mut columns = None;
    for (row, record) in rdr.records().enumerate() {
        let record = record.map_err(|e| Error::Parse {
            line: e.position().map_or(row as u64 + 1, |p| p.line()),
            message: e.to_string(),
        })?;
        let line = record.position().map_or(row as u64 + 1, |p| p.line());
        if record.iter().all(str::is_empty) {
            continue;
        }
        if columns.is_none() && times.is_empty() && record.iter().all(|f| f.parse::<f64>().is_err()) {
            // header
            columns = Some(record.len());
            continue;
        }
        let width = *columns.get_or_insert(record.len());
        if record.len() != width || !(1..=2).contains(&width) {
            return Err(Error::Parse {
                line,
                message: format!("expected {} column(s), found {}", width.min(2), record.len()),
            });
        }
        let mut fields = Vec::with_capacity(width);
        for field in record.iter() {
            let v: f64 = field.parse().map_err(|_| Error::Parse {
                line,
                message: format!("`{field}` is not a number"),
            })?;
            if !v.is_finite() {
                return Err(Error::NonFinite { index: values.len() });
            }
            fields.push(v);
        }
        if width == 2 {
            times.push(fields[0]);
            values.push(fields[1]);
        } else {
            times.push(values.len() as f64);
            values.push(fields[0]);
        }
    }
    TimeSeries::new(times, values)
}

/// Writes `time,value` rows under a header. Values are printed in the
/// shortest form that parses back to the same bits. The file is replaced
/// atomically.
pub fn write_csv(path: &Path, series: &TimeSeries) -> Result<()> {
    let mut text = String::with_capacity(series.len() * 24);
    text.push_str("time,value\n");
    for (t, v) in series.times().iter().zip(series.values()) {
        text.push_str(&format!("{t:?},{v:?}\n"));
    }
    write_atomic(path, text.as_bytes())
}

pub(crate) fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let io_err = |source| Error::Io { path: path.to_path_buf(), source };
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = NamedTempFile::new_in(dir).map_err(io_err)?;
    tmp.write_all(bytes).map_err(io_err)?;
    tmp.persist(path).map_err(|e| io_err(e.error))?;
    Ok(())
}
