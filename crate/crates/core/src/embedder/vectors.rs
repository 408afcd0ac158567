//! Plain-text vector files: a `count dim` header, then `token v1 ... vdim`
//! per line.

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};

pub fn write_vectors<'a, W, I>(mut out: W, dim: usize, rows: I) -> std::io::Result<()>
where
    W: Write,
    I: ExactSizeIterator<Item = (&'a str, &'a [f32])>,
{
    writeln!(out, "{} {}", rows.len(), dim)?;
    for (token, v) in rows {
        write!(out, "{token}")?;
        for x in v {
            // shortest representation that parses back to the same f32
            write!(out, " {x}")?;
        }
        writeln!(out)?;
    }
    out.flush()
}

/// One token and its vector.
pub type Row = (String, Vec<f32>);

/// Rows in file order, with the declared dimension.
pub fn read_vectors<R: BufRead>(reader: R) -> Result<(usize, Vec<Row>)> {
    let mut lines = reader.lines().enumerate();
    let header = match lines.next() {
        Some((_, line)) => line?,
        None => return Err(Error::parse(1, "missing `count dim` header")),
    };
    let mut parts = header.split_whitespace();
    let (count, dim) = match (
        parts.next().and_then(|s| s.parse::<usize>().ok()),
        parts.next().and_then(|s| s.parse::<usize>().ok()),
        parts.next(),
    ) {
        (Some(c), Some(d), None) => (c, d),
        _ => return Err(Error::parse(1, format!("bad header {header:?}"))),
    };
    let mut rows = Vec::with_capacity(count);
    for (i, line) in lines {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let line_no = i + 1;
        let mut fields = line.split_whitespace();
        let token = fields.next().unwrap_or_default().to_string();
        let values = fields
            .map(|f| {
                f.parse::<f32>()
                    .map_err(|_| Error::parse(line_no, format!("not a number: {f:?}")))
            })
            .collect::<Result<Vec<f32>>>()?;
        if values.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: values.len(),
            });
        }
        rows.push((token, values));
    }
    if rows.len() != count {
        log::warn!("vector file declares {count} rows but holds {}", rows.len());
    }
    Ok((dim, rows))
}

/// Pre-trained vectors keyed by token.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Pretrained {
    pub dim: usize,
    pub vectors: HashMap<String, Vec<f32>>,
}

pub fn load_pretrained(path: &Path) -> Result<Pretrained> {
    let file = File::open(path).map_err(|e| Error::file(path, e))?;
    let (dim, rows) = read_vectors(BufReader::new(file))?;
    Ok(Pretrained {
        dim,
        vectors: rows.into_iter().collect(),
    })
}

pub(crate) fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path).map_err(|e| Error::file(path, e))?))
}

pub(crate) fn open(path: &Path) -> Result<BufReader<File>> {
    Ok(BufReader::new(File::open(path).map_err(|e| Error::file(path, e))?))
}
