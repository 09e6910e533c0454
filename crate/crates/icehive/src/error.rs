use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("cannot mutate at frozen vertex {0}")]
    FrozenVertexMutation(String),
    #[error("unknown vertex {0}")]
    UnknownVertex(String),
    #[error("duplicate vertex label {0}")]
    DuplicateLabel(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("mutation class exceeds {0} isomorphism classes")]
    ClassTooLarge(usize),
    #[error("quiver has {0} vertices, too many for brute-force isomorphism")]
    TooManyVertices(usize),
    #[error("exchange relation is not exactly divisible")]
    ExactDivisionFailure,
    #[error("polynomial is not of the form x^g F(y) with F(0) = 1 up to scalar")]
    NoGVector,
    #[error("B-matrix does not have full rank")]
    RankDeficient,
    #[error("not a weight configuration: {0}")]
    InvalidConfig(String),
    #[error("linear system has no rational solution")]
    NoRationalSolution,
    #[error("linear system has rational but no integer solution")]
    NoIntegerSolution,
    #[error("hive size {0} is too small (need l >= 2)")]
    SizeTooSmall(u32),
    #[error("invalid triangulation: {0}")]
    InvalidTriangulation(String),
    #[error("flip undefined: the two triangles traverse the diagonal in the same direction")]
    FlipUndefined,
    #[error("{0} is not a diagonal")]
    NotADiagonal(String),
    #[error("invalid choice: {0}")]
    InvalidChoice(String),
    #[error("pipeline step {step} at vertex {vertex} failed: {reason}")]
    StepFailed { step: usize, vertex: String, reason: String },
    #[error("degenerate evaluation point")]
    DegeneratePoint,
    #[error("singular block at vertex {0}")]
    SingularBlock(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
