use thiserror::Error;

/// Error type for the whole crate.
///
/// Variants that represent a *mathematical* impossibility — something a
/// structure theorem rules out, observed anyway — are distinguished from
/// plain usage/IO errors so the CLI can map them to exit code 2.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("configuration needs at least one point")]
    EmptyConfiguration,

    #[error("points {i} and {j} coincide (separation below 1e-10 of the diameter)")]
    CoincidentPoints { i: usize, j: usize },

    #[error("evaluation at or within the pole guard of point {index} (distance {distance:.3e})")]
    PoleEvaluation { index: usize, distance: f64 },

    #[error("invalid family parameters: {0}")]
    InvalidFamily(String),

    #[error("polynomial root-finding failed ({detail}; residual {residual:.3e})")]
    RootFinding { residual: f64, detail: String },

    #[error("invalid structure: {0}")]
    InvalidStructure(String),

    #[error("matrix is not symmetric (deviation {deviation:.3e})")]
    NotSymmetric { deviation: f64 },

    #[error("matrix dimension {0} is odd; an even-dimensional space is required (embed first)")]
    OddDimension(usize),

    #[error(
        "positivity {positivity} of the form exceeds dim−2 = {limit}; no adapted structure exists"
    )]
    PositivityTooHigh { positivity: usize, limit: usize },

    #[error("structural violation: {0}")]
    TheoremViolation(String),

    #[error("refined critical point lies outside the convex hull (margin {margin:.3e})")]
    HullViolation { margin: f64 },

    #[error("Newton refinement failed: {0}")]
    SolverFailure(String),

    #[error("level value {c} is within {tol:.1e} of the critical value {nearest}; offset it")]
    SingularLevel { c: f64, nearest: f64, tol: f64 },

    #[error("level-set box too small: f reaches {boundary_min} <= c = {c} on the box boundary")]
    BoxTooSmall { c: f64, boundary_min: f64 },

    #[error("non-watertight mesh component: {0}")]
    NonWatertight(String),

    #[error("level-set meshing requires dimension 2 or 3, got {0}")]
    MeshDimension(usize),

    #[error("topology anomaly: {0}")]
    TopologyAnomaly(String),

    #[error("descent trajectory failed: {0}")]
    DescentFailure(String),

    #[error("sweep range is empty or malformed: {0}")]
    BadRange(String),

    #[error("usage: {0}")]
    Usage(String),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// CLI exit code: 2 for violated mathematical invariants, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::TheoremViolation(_)
            | Error::HullViolation { .. }
            | Error::TopologyAnomaly(_)
            | Error::NonWatertight(_) => 2,
            _ => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
