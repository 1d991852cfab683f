use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::matrix::{EmbeddingMatrix, MatrixOrigin};
use crate::{Error, Result};

pub const EMB1_MAGIC: [u8; 4] = *b"EMB1";
pub const EMB1_VERSION: u16 = 1;
pub const EMB1_HEADER_LEN: u64 = 19;
const DTYPE_F32_LE: u8 = 0;

/// On-disk layout: magic, then little-endian version (u16), item count
/// (u64), dimension (u32), dtype tag (u8), then the row-major payload.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EmbeddingFileHeader {
    pub version: u16,
    pub n_items: u64,
    pub dim: u32,
    pub dtype: u8,
}

impl EmbeddingFileHeader {
    pub fn for_matrix(m: &EmbeddingMatrix) -> Result<Self> {
        let dim = u32::try_from(m.dim())
            .map_err(|_| Error::InvalidParameter(format!("dimension {} exceeds u32", m.dim())))?;
        Ok(Self {
            version: EMB1_VERSION,
            n_items: m.n_items() as u64,
            dim,
            dtype: DTYPE_F32_LE,
        })
    }

    pub fn to_bytes(&self) -> [u8; EMB1_HEADER_LEN as usize] {
        let mut b = [0u8; EMB1_HEADER_LEN as usize];
        b[0..4].copy_from_slice(&EMB1_MAGIC);
        b[4..6].copy_from_slice(&self.version.to_le_bytes());
        b[6..14].copy_from_slice(&self.n_items.to_le_bytes());
        b[14..18].copy_from_slice(&self.dim.to_le_bytes());
        b[18] = self.dtype;
        b
    }

    pub fn parse(bytes: &[u8; EMB1_HEADER_LEN as usize], path: &Path) -> Result<Self> {
        let bad = |reason: String| Error::MalformedHeader {
            path: path.to_path_buf(),
            reason,
        };
        if bytes[0..4] != EMB1_MAGIC {
            return Err(bad(format!("bad magic {:?}", &bytes[0..4])));
        }
        let h = Self {
            version: u16::from_le_bytes([bytes[4], bytes[5]]),
            n_items: u64::from_le_bytes(bytes[6..14].try_into().expect("8 bytes")),
            dim: u32::from_le_bytes(bytes[14..18].try_into().expect("4 bytes")),
            dtype: bytes[18],
        };
        if h.version != EMB1_VERSION {
            return Err(bad(format!("unsupported version {}", h.version)));
        }
        if h.dtype != DTYPE_F32_LE {
            return Err(bad(format!("unsupported dtype {}", h.dtype)));
        }
        if h.n_items == 0 || h.dim == 0 {
            return Err(bad(format!("empty shape {}x{}", h.n_items, h.dim)));
        }
        Ok(h)
    }

    /// Payload length in bytes, or `None` on overflow.
    pub fn payload_len(&self) -> Option<u64> {
        self.n_items.checked_mul(self.dim as u64)?.checked_mul(4)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EmbeddingFormat {
    Binary,
    Csv,
}

impl EmbeddingFormat {
    /// `.csv` (any case) is csv; everything else is read as EMB1.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(e) if e.eq_ignore_ascii_case("csv") => Self::Csv,
            _ => Self::Binary,
        }
    }
}

impl FromStr for EmbeddingFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "binary" | "emb1" | "bin" => Ok(Self::Binary),
            "csv" => Ok(Self::Csv),
            other => Err(Error::InvalidParameter(format!("unknown embedding format {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct CsvOptions {
    /// Skip the first line.
    pub header: bool,
}

pub fn load_embeddings(path: &Path, format: EmbeddingFormat) -> Result<EmbeddingMatrix> {
    load_embeddings_with(path, format, CsvOptions::default())
}

pub fn load_embeddings_with(
    path: &Path,
    format: EmbeddingFormat,
    csv: CsvOptions,
) -> Result<EmbeddingMatrix> {
    let m = match format {
        EmbeddingFormat::Binary => read_emb1(path)?,
        EmbeddingFormat::Csv => read_csv(path, csv)?,
    };
    Ok(m.with_origin(MatrixOrigin::File {
        path: path.display().to_string(),
    }))
}

pub fn write_embeddings(m: &EmbeddingMatrix, path: &Path, format: EmbeddingFormat) -> Result<()> {
    match format {
        EmbeddingFormat::Binary => write_emb1(m, path),
        EmbeddingFormat::Csv => write_csv(m, path),
    }
}

fn read_emb1(path: &Path) -> Result<EmbeddingMatrix> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let actual_total = file.metadata().map_err(|e| Error::io(path, e))?.len();
    if actual_total < EMB1_HEADER_LEN {
        return Err(Error::MalformedHeader {
            path: path.to_path_buf(),
            reason: format!("file is {actual_total} bytes, header needs {EMB1_HEADER_LEN}"),
        });
    }
    let mut reader = BufReader::with_capacity(1 << 20, file);
    let mut hb = [0u8; EMB1_HEADER_LEN as usize];
    reader.read_exact(&mut hb).map_err(|e| Error::io(path, e))?;
    let header = EmbeddingFileHeader::parse(&hb, path)?;
    let expected = header.payload_len().ok_or_else(|| Error::MalformedHeader {
        path: path.to_path_buf(),
        reason: format!("shape {}x{} overflows", header.n_items, header.dim),
    })?;
    let actual = actual_total - EMB1_HEADER_LEN;
    if actual != expected {
        return Err(Error::SizeMismatch {
            path: path.to_path_buf(),
            expected,
            actual,
        });
    }
    let n = usize::try_from(header.n_items)
        .map_err(|_| Error::InvalidParameter("item count exceeds address space".into()))?;
    let d = header.dim as usize;
    let mut bytes = vec![0u8; expected as usize];
    reader.read_exact(&mut bytes).map_err(|e| Error::io(path, e))?;
    let data: Vec<f32> = bytes
        .chunks_exact(4)
        .map(|c| f32::from_le_bytes([c[0], c[1], c[2], c[3]]))
        .collect();
    EmbeddingMatrix::new(n, d, data)
}

fn write_emb1(m: &EmbeddingMatrix, path: &Path) -> Result<()> {
    let header = EmbeddingFileHeader::for_matrix(m)?;
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::with_capacity(1 << 20, file);
    let io = |e| Error::io(path, e);
    w.write_all(&header.to_bytes()).map_err(io)?;
    for v in m.data() {
        w.write_all(&v.to_le_bytes()).map_err(io)?;
    }
    w.flush().map_err(io)
}

fn read_csv(path: &Path, opts: CsvOptions) -> Result<EmbeddingMatrix> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(opts.header)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| csv_error(path, e))?;
    let mut data = Vec::new();
    let mut ids: Vec<String> = Vec::new();
    let mut has_ids: Option<bool> = None;
    let mut dim = 0usize;
    let mut n = 0usize;
    let mut record = csv::StringRecord::new();
    loop {
        match reader.read_record(&mut record) {
            Ok(true) => {}
            Ok(false) => break,
            Err(e) => return Err(csv_error(path, e)),
        }
        if record.len() == 1 && record[0].is_empty() {
            continue;
        }
        let row = n;
        // the first row decides whether column 0 holds ids
        let with_id = *has_ids.get_or_insert_with(|| record[0].parse::<f32>().is_err());
        let offset = usize::from(with_id);
        let width = record.len().saturating_sub(offset);
        if row == 0 {
            dim = width;
            if dim == 0 {
                return Err(Error::Parse {
                    row,
                    column: 0,
                    reason: "row has no numeric values".into(),
                });
            }
        } else if width != dim {
            return Err(Error::RaggedRow {
                row,
                expected: dim,
                found: width,
            });
        }
        if with_id {
            ids.push(record[0].to_string());
        }
        for (column, field) in record.iter().skip(offset).enumerate() {
            let v: f32 = field.parse().map_err(|_| Error::Parse {
                row,
                column,
                reason: format!("{field:?} is not a number"),
            })?;
            if !v.is_finite() {
                return Err(Error::NonFinite { row, column });
            }
            data.push(v);
        }
        n += 1;
    }
    if n == 0 {
        return Err(Error::Parse {
            row: 0,
            column: 0,
            reason: format!("{} contains no rows", path.display()),
        });
    }
    let m = EmbeddingMatrix::new(n, dim, data)?;
    if has_ids == Some(true) {
        m.with_ids(ids)
    } else {
        Ok(m)
    }
}

fn write_csv(m: &EmbeddingMatrix, path: &Path) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    let io = |e| Error::io(path, e);
    let ids = m.item_ids();
    let mut line = String::new();
    for (i, row) in m.rows().enumerate() {
        line.clear();
        if let Some(ids) = ids {
            line.push_str(&csv_quote(&ids[i]));
            line.push(',');
        }
        for (j, v) in row.iter().enumerate() {
            if j > 0 {
                line.push(',');
            }
            // shortest representation that parses back to the same f32
            line.push_str(&v.to_string());
        }
        line.push('\n');
        w.write_all(line.as_bytes()).map_err(io)?;
    }
    w.flush().map_err(io)
}

fn csv_quote(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn csv_error(path: &Path, e: csv::Error) -> Error {
    let row = e.position().map_or(0, |p| p.record() as usize);
    match e.into_kind() {
        csv::ErrorKind::Io(source) => Error::io(path, source),
        other => Error::Parse {
            row,
            column: 0,
            reason: format!("{other:?}"),
        },
    }
}
