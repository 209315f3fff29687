use thiserror::Error;

use crate::date::Day;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("malformed header: {0}")]
    MalformedHeader(String),
    #[error("line {line}: non-numeric cell {value:?}")]
    NonNumericCell { line: u64, value: String },
    #[error("date columns are not contiguous: {prev} is followed by {next}")]
    NonContiguousDates { prev: String, next: String },
    #[error("line {line}: {message}")]
    InvalidRow { line: u64, message: String },
    #[error("unknown intervention kind {0:?}")]
    UnknownKind(String),
    #[error("duplicate intervention {kind} for {region}")]
    DuplicateEvent { region: String, kind: String },
    #[error("bad date {0:?}")]
    BadDate(String),
    #[error("missing column {0:?}")]
    MissingColumn(String),
    #[error("{field} = {value} out of range for {region}")]
    OutOfRange {
        region: String,
        field: &'static str,
        value: f64,
    },
    #[error("series too short: need {needed} values, got {got}")]
    TooShort { needed: usize, got: usize },
    #[error("no interventions for region")]
    NoInterventions,
    #[error("training window ends {end} but data stops at {last}")]
    InsufficientData { end: Day, last: Day },
    #[error("non-finite input")]
    NonFinite,
    #[error("validation window must have {expected} days, got {got}")]
    ValidationLength { expected: usize, got: usize },
    #[error("actuals and forecasts are misaligned")]
    Misaligned,
    #[error("no drift detected")]
    NoDrift,
    #[error("death threshold never reached")]
    ThresholdNotReached,
    #[error("empty input")]
    Empty,
    #[error("missing metadata for {0}")]
    MissingMetadata(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("ragged input: expected length {expected}, got {got}")]
    Ragged { expected: usize, got: usize },
    #[error("csv: {0}")]
    Csv(String),
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Csv(e.to_string())
    }
}
