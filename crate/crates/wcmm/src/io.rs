//! Matrix files, worker traces and result writers.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use serde::Serialize;
use wcmm_core::{DenseMatrix, TraceSource, WorkerTrace};

use crate::{Error, Result};

pub const MAGIC: &[u8; 5] = b"CRMM1";

/// On-disk matrix encoding.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MatrixFormat {
    Binary,
    Csv,
}

impl MatrixFormat {
    /// `.csv` (any case) is CSV, everything else CRMM1.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("csv") => MatrixFormat::Csv,
            _ => MatrixFormat::Binary,
        }
    }
}

pub fn write_crmm<W: Write>(mut w: W, m: &DenseMatrix) -> std::io::Result<()> {
    w.write_all(MAGIC)?;
    w.write_all(&(m.rows() as u64).to_le_bytes())?;
    w.write_all(&(m.cols() as u64).to_le_bytes())?;
    for v in m.data() {
        w.write_all(&v.to_le_bytes())?;
    }
    w.flush()
}

/// Reads a CRMM1 stream; trailing bytes after the payload are rejected.
pub fn read_crmm<R: Read>(mut r: R, path: &Path) -> Result<DenseMatrix> {
    let bad = |msg: String| Error::Format {
        path: path.to_path_buf(),
        msg,
    };
    let mut magic = [0u8; 5];
    r.read_exact(&mut magic).map_err(Error::io(path))?;
    if &magic != MAGIC {
        return Err(bad("missing CRMM1 magic".into()));
    }
    let mut word = [0u8; 8];
    r.read_exact(&mut word).map_err(Error::io(path))?;
    let rows = u64::from_le_bytes(word);
    r.read_exact(&mut word).map_err(Error::io(path))?;
    let cols = u64::from_le_bytes(word);
    let len = rows
        .checked_mul(cols)
        .and_then(|n| usize::try_from(n).ok())
        .ok_or_else(|| bad(format!("shape {rows}x{cols} overflows")))?;
    let mut payload = Vec::new();
    r.read_to_end(&mut payload).map_err(Error::io(path))?;
    if payload.len() != len * 8 {
        return Err(bad(format!(
            "expected {} payload bytes for {rows}x{cols}, found {}",
            len * 8,
            payload.len()
        )));
    }
    let data = payload
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("chunk of 8")))
        .collect();
    Ok(DenseMatrix::new(rows as usize, cols as usize, data)?)
}

/// Headerless CSV, one matrix row per record.
pub fn write_matrix_csv<W: Write>(w: W, m: &DenseMatrix) -> Result<()> {
    let mut out = csv::WriterBuilder::new().has_headers(false).from_writer(w);
    for i in 0..m.rows() {
        out.write_record(m.row(i).iter().map(|v| format!("{v:e}")))?;
    }
    out.flush().map_err(csv::Error::from)?;
    Ok(())
}

pub fn read_matrix_csv<R: Read>(r: R, path: &Path) -> Result<DenseMatrix> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_reader(r);
    let mut data = Vec::new();
    let mut cols = None;
    let mut rows = 0;
    for (i, rec) in reader.records().enumerate() {
        let rec = rec?;
        if *cols.get_or_insert(rec.len()) != rec.len() {
            return Err(Error::Format {
                path: path.to_path_buf(),
                msg: format!("row {} has {} fields, expected {}", i + 1, rec.len(), cols.unwrap()),
            });
        }
        for field in rec.iter() {
            data.push(field.parse::<f64>().map_err(|e| Error::Format {
                path: path.to_path_buf(),
                msg: format!("row {}: {field:?}: {e}", i + 1),
            })?);
        }
        rows += 1;
    }
    let cols = cols.ok_or_else(|| Error::Format {
        path: path.to_path_buf(),
        msg: "empty matrix file".into(),
    })?;
    Ok(DenseMatrix::new(rows, cols, data)?)
}

pub fn read_matrix(path: &Path) -> Result<DenseMatrix> {
    let file = BufReader::new(File::open(path).map_err(Error::io(path))?);
    match MatrixFormat::from_path(path) {
        MatrixFormat::Binary => read_crmm(file, path),
        MatrixFormat::Csv => read_matrix_csv(file, path),
    }
}

pub fn write_matrix(path: &Path, m: &DenseMatrix) -> Result<()> {
    let file = BufWriter::new(File::create(path).map_err(Error::io(path))?);
    match MatrixFormat::from_path(path) {
        MatrixFormat::Binary => write_crmm(file, m).map_err(Error::io(path)),
        MatrixFormat::Csv => write_matrix_csv(file, m),
    }
}

/// One duration per row; a non-numeric first row is taken as a header.
pub fn load_trace(path: &Path) -> Result<WorkerTrace> {
    let file = File::open(path).map_err(Error::io(path))?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(BufReader::new(file));
    let row_err = |row: usize, msg: String| Error::TraceRow {
        path: path.to_path_buf(),
        row,
        msg,
    };
    let mut times = Vec::new();
    for (i, rec) in reader.records().enumerate() {
        let rec = rec?;
        let row = i + 1;
        let field = rec.get(0).unwrap_or("");
        match field.parse::<f64>() {
            Ok(v) if v.is_finite() && v > 0.0 => times.push(v),
            Ok(v) => return Err(row_err(row, format!("duration {v} is not positive"))),
            Err(_) if i == 0 => continue,
            Err(_) => return Err(row_err(row, format!("{field:?} is not a number"))),
        }
    }
    if times.is_empty() {
        return Err(Error::Format {
            path: path.to_path_buf(),
            msg: "trace has no durations".into(),
        });
    }
    Ok(WorkerTrace::new(
        times,
        TraceSource::Csv {
            path: path.display().to_string(),
        },
    )?)
}

pub fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<()> {
    let file = BufWriter::new(File::create(path).map_err(Error::io(path))?);
    serde_json::to_writer_pretty(file, value)?;
    Ok(())
}

/// Header row from the field names of `T`, then one record per row.
pub fn write_csv_rows<W: Write, T: Serialize>(w: W, rows: &[T]) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    for row in rows {
        out.serialize(row)?;
    }
    out.flush().map_err(csv::Error::from)?;
    Ok(())
}

/// `.json` paths get pretty JSON, anything else CSV.
pub fn write_rows<T: Serialize>(path: &Path, rows: &[T]) -> Result<()> {
    match path.extension().and_then(|e| e.to_str()) {
        Some(ext) if ext.eq_ignore_ascii_case("json") => write_json(path, rows),
        _ => write_csv_rows(
            BufWriter::new(File::create(path).map_err(Error::io(path))?),
            rows,
        ),
    }
}
