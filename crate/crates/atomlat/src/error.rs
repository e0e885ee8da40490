use thiserror::Error;

/// Errors across the algebra, problem encoders and persistence layers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("constant name already registered: {0}")]
    DuplicateName(String),
    #[error("a term needs at least one component constant")]
    EmptyTerm,
    #[error("unknown constant: {0}")]
    UnknownConstant(String),
    #[error("unknown or dead element given as target")]
    UnknownTarget,
    #[error("unknown or dead atom")]
    UnknownAtom,
    #[error("both elements of a comparison must live in the same algebra")]
    MixedAlgebras,
    #[error("trace is defined for master elements only")]
    DualElementGiven,
    #[error("no discriminant constant can be produced; the relation set is inconsistent")]
    NoDiscriminantPossible,
    #[error("relation set is inconsistent")]
    InconsistentInput,
    #[error("crossing requires its positive trace constraint to hold first")]
    TraceConstraintMissing,
    #[error("the batch itself is self-contradictory")]
    InconsistentTrainingSet,
    #[error("invalid board configuration: {0}")]
    InvalidBoardConfig(String),
    #[error("board has undecided squares")]
    UndecidedSquares,
    #[error("image dimensions do not match the registered constant table")]
    DimensionMismatch,
    #[error("size limit exceeded: {0}")]
    SizeLimitExceeded(String),
    #[error("bad magic number in IDX file: {0:#010x}")]
    BadMagic(u32),
    #[error("image/label counts do not match: {images} images vs {labels} labels")]
    CountMismatch { images: usize, labels: usize },
    #[error("IDX file truncated")]
    TruncatedFile,
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
