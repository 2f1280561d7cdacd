//! Dataset ingestion: ARFF and CSV parsing, missing-value handling and
//! dataset profiling.

mod arff;
mod csv;
mod dataset;
mod impute;
mod profile;

use std::fmt;
use std::path::Path;

use thiserror::Error;

pub use self::arff::{parse_arff, to_arff};
pub use self::csv::{parse_csv, to_csv};
pub use dataset::{normalize_name, Dataset};
pub use impute::{impute_missing, ImputeStrategy};
pub use profile::{profile, DatasetProfile, FeatureStats};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseErrorKind {
    MalformedHeader(String),
    UnsupportedType { attribute: String, kind: String },
    NominalFeature { attribute: String },
    NoClassAttribute,
    ClassArity { attribute: String, count: usize },
    Arity { expected: usize, found: usize },
    NonNumeric { token: String },
    BadLabel { token: String },
    EmptyData,
}

impl fmt::Display for ParseErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::MalformedHeader(msg) => write!(f, "malformed header: {msg}"),
            Self::UnsupportedType { attribute, kind } => {
                write!(f, "attribute {attribute:?} has unsupported type {kind:?}")
            }
            Self::NominalFeature { attribute } => {
                write!(f, "nominal feature {attribute:?} is not supported")
            }
            Self::NoClassAttribute => write!(f, "no class attribute found"),
            Self::ClassArity { attribute, count } => write!(
                f,
                "class attribute {attribute:?} has {count} values, expected 2"
            ),
            Self::Arity { expected, found } => {
                write!(f, "row has {found} fields, expected {expected}")
            }
            Self::NonNumeric { token } => write!(f, "non-numeric value {token:?}"),
            Self::BadLabel { token } => write!(f, "unrecognized class value {token:?}"),
            Self::EmptyData => write!(f, "data section is empty"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub kind: ParseErrorKind,
}

impl ParseError {
    pub fn new(line: usize, kind: ParseErrorKind) -> Self {
        Self { line, kind }
    }
}

#[derive(Debug, Error)]
pub enum IngestError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("unknown label column {0:?}")]
    UnknownColumn(String),
    #[error("feature {feature:?} has no observed values to impute from")]
    AllMissing { feature: String },
    #[error("{dataset}: both classes must be present")]
    SingleClass { dataset: String },
    #[error("invalid dataset: {0}")]
    Invalid(String),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: unsupported file extension (expected .arff or .csv)")]
    UnsupportedFormat { path: String },
}

/// Loads `.arff` or `.csv` by extension. The dataset is named after the file
/// stem; CSV files use `label_column` (default `defects`).
pub fn load_dataset(path: &Path, label_column: Option<&str>) -> Result<Dataset, IngestError> {
    let display = path.display().to_string();
    let text = std::fs::read_to_string(path).map_err(|source| IngestError::Io {
        path: display.clone(),
        source,
    })?;
    let ext = path
        .extension()
        .and_then(|e| e.to_str())
        .map(str::to_ascii_lowercase);
    let d = match ext.as_deref() {
        Some("arff") => parse_arff(&text)?,
        Some("csv") => parse_csv(&text, label_column.unwrap_or("defects"))?,
        _ => return Err(IngestError::UnsupportedFormat { path: display }),
    };
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or(&d.name).to_string();
    Ok(d.with_name(&stem).with_source_path(display))
}
