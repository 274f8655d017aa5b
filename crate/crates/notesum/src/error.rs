//! Error type shared across the crate.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("duplicate note id {note_id:?} for patient {patient_id:?}")]
    DuplicateNote { patient_id: String, note_id: String },

    #[error("invalid date {value:?} at line {line}: expected YYYY-MM-DD")]
    DateFormat { line: usize, value: String },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("later note has no entities; pair carries no coverage signal")]
    EmptyEntities,

    #[error("entity {0:?} missing from the IDF table; table was built from a different corpus or lexicon")]
    MissingIdf(String),

    #[error("note has {sentences} sentences, above the exact-solver cap of {cap}")]
    ExactCapExceeded { sentences: usize, cap: usize },

    #[error("no training examples survived pair filtering")]
    EmptyTrainingSet,

    #[error("note has {note_len} sentences but the position table holds {max}")]
    PositionCapacity { note_len: usize, max: usize },

    #[error("non-finite gradient in parameter block {param:?}")]
    NonFiniteGradient { param: String },

    #[error("no reference summary for note {note_id:?}")]
    MissingReference { note_id: String },

    #[error("reference has fewer than {needed} tokens")]
    ShortReference { needed: usize },

    #[error("pipeline stage {stage:?} failed: {source}")]
    Stage {
        stage: String,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Process exit code for the CLI: 1 usage, 2 data, 3 numerical.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) => 1,
            Error::NonFiniteGradient { .. } => 3,
            Error::Stage { source, .. } => source.exit_code(),
            _ => 2,
        }
    }
}
