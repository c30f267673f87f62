use thiserror::Error;

/// Errors produced anywhere in the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("field degree {0} out of range (1..=16)")]
    FieldDegree(u32),
    #[error("division by zero in GF(2^k)")]
    DivisionByZero,
    #[error("not a root of {system}: {coords}")]
    NotARoot { system: String, coords: String },
    #[error("operands belong to different root systems")]
    MixedSystems,
    #[error("operands belong to different fields")]
    MixedFields,
    #[error("vector is not supported in the top layer (nonzero Cartan part or root outside it)")]
    NotInTopLayer,
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("no root satisfies the requested angle constraints")]
    NoAngleRoot,
    #[error("search budget of {0} moves exhausted")]
    SearchBudget(usize),
    #[error("refused: {0}")]
    Refused(String),
    #[error("ambiguous rank profile: {0}")]
    RankCollision(String),
    #[error("invalid orbit label: {0}")]
    InvalidLabel(String),
    #[error("internal invariant violated: {0}")]
    Internal(String),
    #[error("malformed data: {0}")]
    Format(String),
    #[error("unsupported file version {0}")]
    Version(u32),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
