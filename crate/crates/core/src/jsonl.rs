//! Line-delimited JSON helpers shared by every on-disk dataset format.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::Serialize;

#[derive(Debug, thiserror::Error)]
pub enum JsonlError {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("schema violation at line {line}: {message}")]
    Schema { line: usize, message: String },
}

impl JsonlError {
    pub(crate) fn io(path: &Path, source: std::io::Error) -> Self {
        JsonlError::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    /// 1-based line number for schema errors.
    pub fn line(&self) -> Option<usize> {
        match self {
            JsonlError::Schema { line, .. } => Some(*line),
            JsonlError::Io { .. } => None,
        }
    }
}

/// Parses one JSON value per non-blank line. Line numbers in errors are 1-based.
pub fn parse_jsonl<T, R>(reader: R) -> Result<Vec<T>, JsonlError>
where
    T: DeserializeOwned,
    R: BufRead,
{
    Ok(parse_jsonl_numbered(reader)?.into_iter().map(|(_, v)| v).collect())
}

/// Like [`parse_jsonl`], keeping each record's 1-based line number for
/// follow-up validation errors.
pub fn parse_jsonl_numbered<T, R>(reader: R) -> Result<Vec<(usize, T)>, JsonlError>
where
    T: DeserializeOwned,
    R: BufRead,
{
    let mut out = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line.map_err(|e| JsonlError::Schema {
            line: line_no,
            message: format!("unreadable line: {e}"),
        })?;
        if line.trim().is_empty() {
            continue;
        }
        let value = serde_json::from_str(&line).map_err(|e| JsonlError::Schema {
            line: line_no,
            message: e.to_string(),
        })?;
        out.push((line_no, value));
    }
    Ok(out)
}

pub fn read_jsonl_numbered<T: DeserializeOwned>(path: &Path) -> Result<Vec<(usize, T)>, JsonlError> {
    let file = File::open(path).map_err(|e| JsonlError::io(path, e))?;
    parse_jsonl_numbered(BufReader::new(file))
}

pub fn read_jsonl<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>, JsonlError> {
    let file = File::open(path).map_err(|e| JsonlError::io(path, e))?;
    parse_jsonl(BufReader::new(file))
}

pub fn write_jsonl_to<T: Serialize, W: Write>(out: &mut W, items: &[T]) -> std::io::Result<()> {
    for item in items {
        serde_json::to_writer(&mut *out, item)?;
        out.write_all(b"\n")?;
    }
    out.flush()
}

pub fn write_jsonl<T: Serialize>(path: &Path, items: &[T]) -> Result<(), JsonlError> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent).map_err(|e| JsonlError::io(parent, e))?;
    }
    let file = File::create(path).map_err(|e| JsonlError::io(path, e))?;
    let mut out = BufWriter::new(file);
    write_jsonl_to(&mut out, items).map_err(|e| JsonlError::io(path, e))
}

/// Appends a single record, creating the file if needed.
pub fn append_jsonl<T: Serialize>(path: &Path, item: &T) -> Result<(), JsonlError> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent).map_err(|e| JsonlError::io(parent, e))?;
    }
    let mut file = std::fs::OpenOptions::new()
        .create(true)
        .append(true)
        .open(path)
        .map_err(|e| JsonlError::io(path, e))?;
    let mut line = serde_json::to_vec(item).map_err(|e| JsonlError::io(path, e.into()))?;
    line.push(b'\n');
    file.write_all(&line).map_err(|e| JsonlError::io(path, e))
}
