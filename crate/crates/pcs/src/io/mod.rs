//! On-disk formats.

pub mod front;
pub mod meta;
pub mod results;
pub mod snapshot;
pub mod spec;
pub mod trace;

use std::path::{Path, PathBuf};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: row {row}: {msg}")]
    Row { path: PathBuf, row: u64, msg: String },
    #[error("{path}: {msg}")]
    Invalid { path: PathBuf, msg: String },
    #[error("{0}")]
    Csv(#[from] csv::Error),
    #[error("{0}")]
    Json(#[from] serde_json::Error),
}

impl FormatError {
    pub(crate) fn io(path: &Path, source: std::io::Error) -> Self {
        FormatError::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    pub(crate) fn invalid(path: &Path, msg: impl ToString) -> Self {
        FormatError::Invalid {
            path: path.to_path_buf(),
            msg: msg.to_string(),
        }
    }
}

pub(crate) fn read_to_string(path: &Path) -> Result<String, FormatError> {
    std::fs::read_to_string(path).map_err(|e| FormatError::io(path, e))
}

pub(crate) fn write_file(path: &Path, contents: &[u8]) -> Result<(), FormatError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| FormatError::io(dir, e))?;
    }
    std::fs::write(path, contents).map_err(|e| FormatError::io(path, e))
}

/// Row-level context for a workload validation failure.
pub(crate) fn row_error(path: &Path, row: u64, e: impl std::fmt::Display) -> FormatError {
    FormatError::Row {
        path: path.to_path_buf(),
        row,
        msg: e.to_string(),
    }
}

/// An `f64` that serializes infinities as the strings `"inf"` / `"-inf"`,
/// which plain JSON numbers cannot carry.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Real(pub f64);

impl serde::Serialize for Real {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        if self.0.is_finite() {
            s.serialize_f64(self.0)
        } else if self.0 == f64::INFINITY {
            s.serialize_str("inf")
        } else if self.0 == f64::NEG_INFINITY {
            s.serialize_str("-inf")
        } else {
            Err(serde::ser::Error::custom("NaN is not serializable"))
        }
    }
}

impl<'de> serde::Deserialize<'de> for Real {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(serde::Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Num(f64),
            Str(String),
        }
        match Repr::deserialize(d)? {
            Repr::Num(v) => Ok(Real(v)),
            Repr::Str(s) => match s.as_str() {
                "inf" | "+inf" | "infinity" => Ok(Real(f64::INFINITY)),
                "-inf" | "-infinity" => Ok(Real(f64::NEG_INFINITY)),
                other => other
                    .parse()
                    .map(Real)
                    .map_err(|_| serde::de::Error::custom(format!("not a number: {other:?}"))),
            },
        }
    }
}
