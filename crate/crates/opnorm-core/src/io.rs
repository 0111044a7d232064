//! Matrix Market (array and coordinate, real general) and plain TSV readers
//! and writers. Both formats round-trip through [`write_matrix`].

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;

/// Input container formats. The Matrix Market variant (array vs coordinate)
/// is read off the header line.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InputFormat {
    MatrixMarket,
    Tsv,
}

/// Output formats.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    MatrixMarketArray,
    MatrixMarketCoordinate,
    Tsv,
}

/// Read a matrix, picking the format from the content: files opening with
/// `%%MatrixMarket` parse as Matrix Market, anything else as TSV.
pub fn read_matrix_path(path: &Path) -> Result<DenseMatrix> {
    let text = std::fs::read_to_string(path)?;
    let format = if text.trim_start().starts_with("%%MatrixMarket") {
        InputFormat::MatrixMarket
    } else {
        InputFormat::Tsv
    };
    read_matrix(text.as_bytes(), format)
}

pub fn read_matrix<R: std::io::Read>(reader: R, format: InputFormat) -> Result<DenseMatrix> {
    let reader = BufReader::new(reader);
    match format {
        InputFormat::MatrixMarket => read_matrix_market(reader),
        InputFormat::Tsv => read_tsv(reader),
    }
}

pub fn write_matrix<W: Write>(w: W, m: &DenseMatrix, format: OutputFormat) -> Result<()> {
    let mut w = BufWriter::new(w);
    match format {
        OutputFormat::MatrixMarketArray => {
            writeln!(w, "%%MatrixMarket matrix array real general")?;
            writeln!(w, "{} {}", m.rows(), m.cols())?;
            // Array format stores values in column-major order.
            for j in 0..m.cols() {
                for i in 0..m.rows() {
                    writeln!(w, "{}", m.get(i, j))?;
                }
            }
        }
        OutputFormat::MatrixMarketCoordinate => {
            writeln!(w, "%%MatrixMarket matrix coordinate real general")?;
            let nnz = m.entries().iter().filter(|&&e| e != 0.0).count();
            writeln!(w, "{} {} {}", m.rows(), m.cols(), nnz)?;
            for i in 0..m.rows() {
                for j in 0..m.cols() {
                    let v = m.get(i, j);
                    if v != 0.0 {
                        writeln!(w, "{} {} {}", i + 1, j + 1, v)?;
                    }
                }
            }
        }
        OutputFormat::Tsv => {
            for i in 0..m.rows() {
                let line = m
                    .row(i)
                    .iter()
                    .map(|v| v.to_string())
                    .collect::<Vec<_>>()
                    .join("\t");
                writeln!(w, "{line}")?;
            }
        }
    }
    w.flush()?;
    Ok(())
}

pub fn write_matrix_path(path: &Path, m: &DenseMatrix, format: OutputFormat) -> Result<()> {
    write_matrix(File::create(path)?, m, format)
}

fn parse_f64(tok: &str, line: usize) -> Result<f64> {
    tok.parse::<f64>()
        .map_err(|_| Error::format(line, format!("cannot parse value `{tok}`")))
}

fn parse_usize(tok: &str, line: usize) -> Result<usize> {
    tok.parse::<usize>()
        .map_err(|_| Error::format(line, format!("cannot parse integer `{tok}`")))
}

fn read_matrix_market<R: BufRead>(reader: R) -> Result<DenseMatrix> {
    let mut lines = reader.lines().enumerate();

    let (lineno, header) = match lines.next() {
        Some((i, l)) => (i + 1, l?),
        None => return Err(Error::format(1, "empty file")),
    };
    let fields: Vec<&str> = header.split_whitespace().collect();
    if fields.len() < 4 || fields[0] != "%%MatrixMarket" || fields[1] != "matrix" {
        return Err(Error::format(lineno, "expected `%%MatrixMarket matrix ...` header"));
    }
    let coordinate = match fields[2] {
        "array" => false,
        "coordinate" => true,
        other => {
            return Err(Error::format(
                lineno,
                format!("unsupported storage `{other}` (expected array or coordinate)"),
            ))
        }
    };
    if fields[3] != "real" {
        return Err(Error::format(
            lineno,
            format!("unsupported field `{}` (only real is supported)", fields[3]),
        ));
    }
    if let Some(&sym) = fields.get(4) {
        if sym != "general" {
            return Err(Error::format(
                lineno,
                format!("unsupported symmetry `{sym}` (only general is supported)"),
            ));
        }
    }

    // The size line is the first non-comment, non-blank line after the header.
    let mut size_line = None;
    for (i, l) in lines.by_ref() {
        let l = l?;
        let t = l.trim();
        if t.is_empty() || t.starts_with('%') {
            continue;
        }
        size_line = Some((i + 1, l));
        break;
    }
    let (size_lineno, size_line) =
        size_line.ok_or_else(|| Error::format(2, "missing size line"))?;
    let toks: Vec<&str> = size_line.split_whitespace().collect();

    if coordinate {
        if toks.len() != 3 {
            return Err(Error::format(size_lineno, "expected `rows cols nnz`"));
        }
        let rows = parse_usize(toks[0], size_lineno)?;
        let cols = parse_usize(toks[1], size_lineno)?;
        let nnz = parse_usize(toks[2], size_lineno)?;
        if rows == 0 || cols == 0 {
            return Err(Error::format(size_lineno, "matrix dimensions must be positive"));
        }
        let mut entries = vec![0.0; rows * cols];
        let mut seen = vec![false; rows * cols];
        let mut count = 0usize;
        for (i, l) in lines {
            let lineno = i + 1;
            let l = l?;
            let t = l.trim();
            if t.is_empty() || t.starts_with('%') {
                continue;
            }
            let toks: Vec<&str> = t.split_whitespace().collect();
            if toks.len() != 3 {
                return Err(Error::format(lineno, "expected `i j value`"));
            }
            let r = parse_usize(toks[0], lineno)?;
            let c = parse_usize(toks[1], lineno)?;
            let v = parse_f64(toks[2], lineno)?;
            if r < 1 || r > rows || c < 1 || c > cols {
                return Err(Error::format(lineno, format!("index ({r}, {c}) out of range")));
            }
            let idx = (r - 1) * cols + (c - 1);
            if seen[idx] {
                return Err(Error::format(lineno, format!("duplicate entry ({r}, {c})")));
            }
            seen[idx] = true;
            entries[idx] = v;
            count += 1;
        }
        if count != nnz {
            return Err(Error::format(
                size_lineno,
                format!("header declares {nnz} entries but {count} were given"),
            ));
        }
        // Entries not listed stay zero.
        DenseMatrix::new(rows, cols, entries)
    } else {
        if toks.len() != 2 {
            return Err(Error::format(size_lineno, "expected `rows cols`"));
        }
        let rows = parse_usize(toks[0], size_lineno)?;
        let cols = parse_usize(toks[1], size_lineno)?;
        if rows == 0 || cols == 0 {
            return Err(Error::format(size_lineno, "matrix dimensions must be positive"));
        }
        let mut values = Vec::with_capacity(rows * cols);
        let mut last_line = size_lineno;
        for (i, l) in lines {
            let lineno = i + 1;
            let l = l?;
            let t = l.trim();
            if t.is_empty() || t.starts_with('%') {
                continue;
            }
            for tok in t.split_whitespace() {
                values.push(parse_f64(tok, lineno)?);
            }
            last_line = lineno;
        }
        if values.len() != rows * cols {
            return Err(Error::format(
                last_line,
                format!("expected {} values for {rows}x{cols}, got {}", rows * cols, values.len()),
            ));
        }
        // Column-major on disk -> row-major in memory.
        let mut entries = vec![0.0; rows * cols];
        for (k, v) in values.into_iter().enumerate() {
            let j = k / rows;
            let i = k % rows;
            entries[i * cols + j] = v;
        }
        DenseMatrix::new(rows, cols, entries)
    }
}

fn read_tsv<R: BufRead>(reader: R) -> Result<DenseMatrix> {
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut width = None;
    for (i, l) in reader.lines().enumerate() {
        let lineno = i + 1;
        let l = l?;
        let t = l.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        let row: Vec<f64> = t
            .split_whitespace()
            .map(|tok| parse_f64(tok, lineno))
            .collect::<Result<_>>()?;
        match width {
            None => width = Some(row.len()),
            Some(w) if w != row.len() => {
                return Err(Error::format(
                    lineno,
                    format!("row has {} columns, expected {w}", row.len()),
                ))
            }
            _ => {}
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::format(1, "no data rows"));
    }
    DenseMatrix::from_rows(&rows)
}
