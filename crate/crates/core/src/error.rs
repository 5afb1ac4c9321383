use thiserror::Error;

use crate::complex::CellId;

/// Errors raised by the toolkit.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum MorseError {
    #[error("duplicate cell with vertices {0:?}")]
    DuplicateCell(Vec<u32>),
    #[error("vertex index {index} out of range (vertex count {count})")]
    DanglingVertexIndex { index: u32, count: usize },
    #[error("simplex {0:?} repeats a vertex")]
    DegenerateSimplex(Vec<u32>),
    #[error("edge ({0}, {1}) has more than two triangle cofaces")]
    NonManifoldEdge(u32, u32),
    #[error("unknown cell {0}")]
    UnknownCell(CellId),

    #[error("expected {expected} vertex values, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("value for vertex {0} is not finite")]
    NonFiniteValue(usize),

    #[error("cycle detected in V-path relation at {0}")]
    CycleDetected(CellId),
    #[error("matching is inconsistent: {0}")]
    InvalidMatching(String),
    #[error("index mismatch: dim p = {p_dim}, dim q = {q_dim}")]
    IndexMismatch { p_dim: u8, q_dim: u8 },
    #[error("cell {0} is not critical")]
    NotCritical(CellId),
    #[error("plan does not match the current gradient")]
    StalePlan,
    #[error("path enumeration exceeded {0} paths")]
    TooManyPaths(usize),

    #[error("profile endpoints not increasing: first {first}, last {last}")]
    EndpointOrder { first: f64, last: f64 },
    #[error("profile is not strictly increasing on its end margins")]
    MarginNotMonotone,
    #[error("profile needs at least {needed} samples, got {got}")]
    ProfileTooShort { needed: usize, got: usize },

    #[error("descending path from {0} never reaches the target level")]
    OrbitBelowLevelMissing(CellId),
    #[error("value budget too tight around {0}")]
    BudgetTooTight(CellId),
    #[error("frontier conflict realizing cancellation of ({p}, {q}): {reason}")]
    FrontierConflict { p: CellId, q: CellId, reason: String },
    #[error("support census is not monotone in t")]
    NonMonotoneCensus,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("parse error: {0}")]
    Parse(String),
    #[error("invariant violated: {0}")]
    InvariantViolation(String),
}

impl MorseError {
    /// Structural problems with input meshes or values, as opposed to
    /// failures of a computation on valid input.
    pub fn is_input(&self) -> bool {
        matches!(
            self,
            MorseError::DuplicateCell(_)
                | MorseError::DanglingVertexIndex { .. }
                | MorseError::DegenerateSimplex(_)
                | MorseError::NonManifoldEdge(..)
                | MorseError::LengthMismatch { .. }
                | MorseError::NonFiniteValue(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, MorseError>;
