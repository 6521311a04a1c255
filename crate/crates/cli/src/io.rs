//! Line-delimited JSON files and atomic writes.

use std::fmt;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::Serialize;

/// Failure to read an input file. Always maps to exit status 2.
#[derive(Debug)]
pub enum InputError {
    Unreadable {
        path: PathBuf,
        message: String,
    },
    Malformed {
        path: PathBuf,
        line: usize,
        message: String,
    },
}

impl fmt::Display for InputError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InputError::Unreadable { path, message } => {
                write!(f, "cannot read {}: {message}", path.display())
            }
            InputError::Malformed {
                path,
                line,
                message,
            } => {
                write!(f, "{}: line {line}: {message}", path.display())
            }
        }
    }
}

impl std::error::Error for InputError {}

/// A parsed record and its 1-based line number.
#[derive(Debug, Clone, PartialEq)]
pub struct Numbered<T> {
    pub line: usize,
    pub record: T,
}

/// Parses every non-blank line. Stops at the first malformed line.
pub fn read_jsonl<T: DeserializeOwned>(path: &Path) -> Result<Vec<Numbered<T>>, InputError> {
    let text = fs::read_to_string(path).map_err(|e| InputError::Unreadable {
        path: path.to_path_buf(),
        message: e.to_string(),
    })?;
    parse_jsonl(&text).map_err(|(line, message)| InputError::Malformed {
        path: path.to_path_buf(),
        line,
        message,
    })
}

pub fn parse_jsonl<T: DeserializeOwned>(text: &str) -> Result<Vec<Numbered<T>>, (usize, String)> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let record = serde_json::from_str(line).map_err(|e| (i + 1, e.to_string()))?;
        out.push(Numbered {
            line: i + 1,
            record,
        });
    }
    Ok(out)
}

pub fn to_jsonl<T: Serialize>(records: impl IntoIterator<Item = T>) -> String {
    let mut out = String::new();
    for r in records {
        out.push_str(&serde_json::to_string(&r).expect("records serialize"));
        out.push('\n');
    }
    out
}

/// Writes to a temp file next to `path`, then renames over it.
pub fn write_atomic(path: &Path, contents: &[u8]) -> std::io::Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

/// `out.jsonl` -> `out.jsonl.errors.jsonl`
pub fn errors_sidecar(output: &Path) -> PathBuf {
    let mut name = output.as_os_str().to_owned();
    name.push(".errors.jsonl");
    PathBuf::from(name)
}
