use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("operands belong to different algebras")]
    MixedAlgebra,
    #[error("degree {degree} outside 0..={max}")]
    DegreeOutOfRange { degree: u32, max: u32 },
    #[error("element is not a coboundary")]
    NotExact,
    #[error("generator {0} has no weight")]
    MissingWeights(String),
    #[error("differential of {0} is not weight-homogeneous")]
    WeightInhomogeneousDifferential(String),
    #[error("invalid algebra: {0}")]
    InvalidAlgebra(String),
    #[error("invalid map: {0}")]
    InvalidMap(String),
    #[error("invalid homotopy: {0}")]
    InvalidHomotopy(String),
    #[error("t-degree {degree} exceeds cap {cap}")]
    TDegreeCap { degree: u32, cap: u32 },
    #[error("class elements have different base maps")]
    BaseMismatch,
    #[error("class elements have different levels")]
    LevelMismatch,
    #[error("eta violates the chain condition on {0}")]
    InvalidEta(String),
    #[error("invalid extension problem: {0}")]
    InvalidProblem(String),
    #[error("obstruction class is nonzero")]
    NonzeroObstruction,
    #[error("unknown model or schema: {0}")]
    UnknownSchema(String),
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("validation error: {0}")]
    Validation(String),
    #[error("direction (0, 0) is degenerate")]
    DegenerateDirection,
    #[error("map image leaves the representative space at {0}")]
    NotInW(String),
    #[error("target dimension {0} exceeds 4")]
    DimensionTooLarge(usize),
    #[error("search window [-{0}, {0}] exceeded")]
    SearchWindowExceeded(i64),
    #[error("non-integral coefficient where an integer was required")]
    NotIntegral,
}

pub type Result<T> = std::result::Result<T, Error>;
