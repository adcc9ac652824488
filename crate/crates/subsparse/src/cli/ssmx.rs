//! SSMX matrix container: a one-line ASCII header followed by the matrix
//! payload.
//!
//! ```text
//! SSMX v1 <rows> <cols> <encoding>\n
//! ```
//!
//! `encoding` is `text` (one column per line, entries space-separated,
//! shortest round-trip decimal) or `f64le` (raw little-endian IEEE-754
//! doubles, column-major). Both encodings round-trip every finite and
//! non-finite value bit-exactly except NaN payloads, which collapse to the
//! canonical quiet NaN. The parser reports failures with the byte offset at
//! which they were detected.

use std::fmt;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Container version this build reads and writes.
pub const SSMX_VERSION: u32 = 1;

/// Payload encoding.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Encoding {
    /// One column per line, space-separated shortest round-trip decimals.
    Text,
    /// Raw little-endian 64-bit IEEE floats, column-major.
    F64le,
}

impl fmt::Display for Encoding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Encoding::Text => write!(f, "text"),
            Encoding::F64le => write!(f, "f64le"),
        }
    }
}

impl FromStr for Encoding {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "text" => Ok(Encoding::Text),
            "f64le" => Ok(Encoding::F64le),
            other => Err(format!("unknown encoding `{other}` (expected `text` or `f64le`)")),
        }
    }
}

/// Errors raised while reading or writing containers. Parse failures carry
/// the byte offset at which they were detected.
#[derive(Debug, Error)]
pub enum FormatError {
    #[error("{path}: unsupported container version `v{found}` (this build reads `v{supported}`)")]
    VersionMismatch {
        path: PathBuf,
        found: String,
        supported: u32,
    },
    #[error("{path}: malformed at byte {offset}: {detail}")]
    Malformed {
        path: PathBuf,
        offset: usize,
        detail: String,
    },
    #[error("{path}: truncated at byte {offset}: {detail}")]
    Truncated {
        path: PathBuf,
        offset: usize,
        detail: String,
    },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: invalid contents: {detail}")]
    Invalid { path: PathBuf, detail: String },
}

impl FormatError {
    fn io(path: &Path, source: std::io::Error) -> Self {
        FormatError::Io {
            path: path.to_path_buf(),
            source,
        }
    }
}

/// Write `matrix` to `path` in the given encoding.
pub fn write_matrix(
    path: &Path,
    matrix: &DMatrix<f64>,
    encoding: Encoding,
) -> Result<(), FormatError> {
    let rows = matrix.nrows();
    let cols = matrix.ncols();
    let mut buf: Vec<u8> = Vec::new();
    buf.extend_from_slice(format!("SSMX v{SSMX_VERSION} {rows} {cols} {encoding}\n").as_bytes());
    match encoding {
        Encoding::Text => {
            // A matrix with no entries has no payload (empty column lines
            // would be indistinguishable from structure).
            let mut line = String::new();
            for j in 0..(if rows == 0 { 0 } else { cols }) {
                line.clear();
                for i in 0..rows {
                    if i > 0 {
                        line.push(' ');
                    }
                    // `{}` is the shortest decimal that round-trips the bits.
                    line.push_str(&format!("{}", matrix[(i, j)]));
                }
                line.push('\n');
                buf.extend_from_slice(line.as_bytes());
            }
        }
        Encoding::F64le => {
            // nalgebra stores column-major, matching the on-disk order.
            for v in matrix.as_slice() {
                buf.extend_from_slice(&v.to_le_bytes());
            }
        }
    }
    let mut file = fs::File::create(path).map_err(|e| FormatError::io(path, e))?;
    file.write_all(&buf).map_err(|e| FormatError::io(path, e))?;
    Ok(())
}

/// Read a matrix from `path`, in either encoding.
pub fn read_matrix(path: &Path) -> Result<DMatrix<f64>, FormatError> {
    let bytes = fs::read(path).map_err(|e| FormatError::io(path, e))?;
    parse_matrix(path, &bytes)
}

fn malformed(path: &Path, offset: usize, detail: impl Into<String>) -> FormatError {
    FormatError::Malformed {
        path: path.to_path_buf(),
        offset,
        detail: detail.into(),
    }
}

fn truncated(path: &Path, offset: usize, detail: impl Into<String>) -> FormatError {
    FormatError::Truncated {
        path: path.to_path_buf(),
        offset,
        detail: detail.into(),
    }
}

fn parse_matrix(path: &Path, bytes: &[u8]) -> Result<DMatrix<f64>, FormatError> {
    // Header line.
    let header_end = bytes
        .iter()
        .position(|&b| b == b'\n')
        .ok_or_else(|| truncated(path, bytes.len(), "no newline terminating the header line"))?;
    let header = std::str::from_utf8(&bytes[..header_end])
        .map_err(|e| malformed(path, e.valid_up_to(), "header is not valid UTF-8"))?;
    let mut fields = header.split_ascii_whitespace();
    match fields.next() {
        Some("SSMX") => {}
        Some(other) => {
            return Err(malformed(
                path,
                0,
                format!("expected magic `SSMX`, found `{other}`"),
            ))
        }
        None => return Err(malformed(path, 0, "empty header line")),
    }
    let version_token = fields
        .next()
        .ok_or_else(|| malformed(path, header_end, "missing version field"))?;
    let version_ok = version_token
        .strip_prefix('v')
        .and_then(|v| v.parse::<u32>().ok())
        .map(|v| v == SSMX_VERSION)
        .unwrap_or(false);
    if !version_ok {
        return Err(FormatError::VersionMismatch {
            path: path.to_path_buf(),
            found: version_token.trim_start_matches('v').to_string(),
            supported: SSMX_VERSION,
        });
    }
    let rows: usize = fields
        .next()
        .and_then(|t| t.parse().ok())
        .ok_or_else(|| malformed(path, header_end, "missing or non-numeric row count"))?;
    let cols: usize = fields
        .next()
        .and_then(|t| t.parse().ok())
        .ok_or_else(|| malformed(path, header_end, "missing or non-numeric column count"))?;
    let encoding: Encoding = fields
        .next()
        .ok_or_else(|| malformed(path, header_end, "missing encoding field"))?
        .parse()
        .map_err(|e: String| malformed(path, header_end, e))?;
    if let Some(extra) = fields.next() {
        return Err(malformed(
            path,
            header_end,
            format!("unexpected trailing header field `{extra}`"),
        ));
    }

    let data_start = header_end + 1;
    let entries = rows
        .checked_mul(cols)
        .ok_or_else(|| malformed(path, header_end, "rows × cols overflows"))?;

    match encoding {
        Encoding::F64le => {
            let need = entries
                .checked_mul(8)
                .ok_or_else(|| malformed(path, header_end, "payload size overflows"))?;
            let have = bytes.len() - data_start;
            if have < need {
                return Err(truncated(
                    path,
                    bytes.len(),
                    format!("payload needs {need} bytes, found {have}"),
                ));
            }
            if have > need {
                return Err(malformed(
                    path,
                    data_start + need,
                    format!("{} trailing bytes after the payload", have - need),
                ));
            }
            let mut values = Vec::with_capacity(entries);
            for k in 0..entries {
                let at = data_start + 8 * k;
                let chunk: [u8; 8] = bytes[at..at + 8].try_into().expect("length checked");
                values.push(f64::from_le_bytes(chunk));
            }
            Ok(DMatrix::from_vec(rows, cols, values))
        }
        Encoding::Text => {
            let text = std::str::from_utf8(&bytes[data_start..])
                .map_err(|e| malformed(path, data_start + e.valid_up_to(), "payload is not valid UTF-8"))?;
            if entries == 0 {
                if !text.trim().is_empty() {
                    return Err(malformed(path, data_start, "payload for an empty matrix"));
                }
                return Ok(DMatrix::zeros(rows, cols));
            }
            let mut values = vec![0.0f64; entries];
            let mut col = 0usize;
            let mut line_start = data_start;
            for line in text.split('\n') {
                if !line.trim().is_empty() {
                    if col >= cols {
                        return Err(malformed(
                            path,
                            line_start,
                            format!("more than {cols} data lines"),
                        ));
                    }
                    let mut got = 0usize;
                    let mut cursor = 0usize;
                    let line_bytes = line.as_bytes();
                    while cursor < line_bytes.len() {
                        if line_bytes[cursor].is_ascii_whitespace() {
                            cursor += 1;
                            continue;
                        }
                        let token_start = cursor;
                        while cursor < line_bytes.len() && !line_bytes[cursor].is_ascii_whitespace()
                        {
                            cursor += 1;
                        }
                        let token = &line[token_start..cursor];
                        if got >= rows {
                            return Err(malformed(
                                path,
                                line_start + token_start,
                                format!("column {col} has more than {rows} entries"),
                            ));
                        }
                        let value: f64 = token.parse().map_err(|_| {
                            malformed(
                                path,
                                line_start + token_start,
                                format!("cannot parse `{token}` as a number"),
                            )
                        })?;
                        // Column-major: entry `got` of column `col`.
                        values[col * rows + got] = value;
                        got += 1;
                    }
                    if got != rows {
                        return Err(truncated(
                            path,
                            line_start + line.len(),
                            format!("column {col} has {got} entries, expected {rows}"),
                        ));
                    }
                    col += 1;
                }
                line_start += line.len() + 1;
            }
            if col != cols {
                return Err(truncated(
                    path,
                    bytes.len(),
                    format!("found {col} data lines, expected {cols}"),
                ));
            }
            Ok(DMatrix::from_vec(rows, cols, values))
        }
    }
}
