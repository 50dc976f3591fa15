use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("pitch {pitch} does not divide edge {edge} of length {length}")]
    NonDividingPitch { pitch: f64, edge: usize, length: f64 },
    #[error("graph is disconnected ({components} components)")]
    DisconnectedGraph { components: usize },
    #[error("invalid graph: {0}")]
    InvalidGraph(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("incompatible mesh: {0}")]
    IncompatibleMesh(String),
    #[error("{nodes} nodes exceeds the dense threshold {threshold}")]
    TooLargeForDense { nodes: usize, threshold: usize },
    #[error("mass matrix has a non-positive entry at node {node}")]
    NotPositiveMass { node: usize },
    #[error("Lanczos did not converge after {iterations} iterations")]
    NoConvergence { iterations: usize },
    #[error("lambda {lambda} exceeds the truncation {truncation}")]
    BeyondTruncation { lambda: f64, truncation: f64 },
    #[error("spectra come from meshes with different pitches ({lower} vs {upper})")]
    MisalignedMeshes { lower: f64, upper: f64 },
    #[error("eigenvector {index} (lambda = {lambda}) is neither fiber-constant nor fiber-mean-zero (residual {residual:e})")]
    UnclassifiableVector { index: usize, lambda: f64, residual: f64 },
    #[error("invalid Laakso sequence: {0}")]
    InvalidSequence(String),
    #[error("gasket level {gasket_level} cannot resolve fiber depth {fiber_depth}")]
    ResolutionTooCoarse { gasket_level: usize, fiber_depth: usize },
    #[error("string lengths must be strictly decreasing: l[{index}] = {next} >= {prev}")]
    InfeasibleNesting { index: usize, prev: f64, next: f64 },
    #[error("invalid string spec: {0}")]
    InvalidString(String),
    #[error("no common pitch: {0}")]
    NoCommonPitch(String),
    #[error("exponent {exponent} is not above the abscissa of convergence {abscissa}")]
    DivergentRange { exponent: f64, abscissa: f64 },
    #[error("invalid spec: {0}")]
    InvalidSpec(String),
    #[error("malformed input: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

/// Coarse grouping used by the command-line front end for exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Spec,
    Solver,
    Commensurability,
    Other,
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::InvalidSequence(_)
            | Error::ResolutionTooCoarse { .. }
            | Error::InfeasibleNesting { .. }
            | Error::InvalidString(_)
            | Error::InvalidSpec(_)
            | Error::InvalidGraph(_)
            | Error::NonDividingPitch { .. }
            | Error::DisconnectedGraph { .. }
            | Error::Json(_) => ErrorKind::Spec,
            Error::NoConvergence { .. }
            | Error::TooLargeForDense { .. }
            | Error::NotPositiveMass { .. }
            | Error::UnclassifiableVector { .. } => ErrorKind::Solver,
            Error::NoCommonPitch(_) => ErrorKind::Commensurability,
            _ => ErrorKind::Other,
        }
    }

    /// Process exit code: 2 bad spec, 3 solver failure, 4 incommensurable lengths.
    pub fn exit_code(&self) -> i32 {
        match self.kind() {
            ErrorKind::Spec => 2,
            ErrorKind::Solver => 3,
            ErrorKind::Commensurability => 4,
            ErrorKind::Other => 1,
        }
    }
}
