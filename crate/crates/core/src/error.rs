use thiserror::Error;

pub type Result<T, E = FlowError> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FlowError {
    #[error("invalid curve: {0}")]
    InvalidCurve(String),

    #[error("cusp at vertex {vertex}: adjacent edges are antiparallel (|tau_j + tau_j+1| = {magnitude:e})")]
    Cusp { vertex: usize, magnitude: f64 },

    #[error("nonpositive perimeter {0}")]
    NonpositivePerimeter(f64),

    #[error("invalid vertex count {n}: {reason}")]
    InvalidN { n: usize, reason: &'static str },

    #[error("singular system: pivot {pivot:e} at row {row} is below tolerance")]
    SingularSystem { row: usize, pivot: f64 },

    #[error("mesh degenerated: edge {edge} has length {length:e} (perimeter {perimeter:e})")]
    MeshDegenerate {
        edge: usize,
        length: f64,
        perimeter: f64,
    },

    #[error("size mismatch: expected {expected}, got {got}")]
    SizeMismatch { expected: usize, got: usize },

    #[error("degenerate input polygon: {0}")]
    DegenerateInput(String),

    #[error("segment arrangement could not be resolved (grid-quadrature estimate {fallback})")]
    NumericalDegeneracy { fallback: f64 },

    #[error("error values must be positive, got {0}")]
    NonpositiveError(f64),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("at time level {level}: {source}")]
    AtLevel {
        level: usize,
        #[source]
        source: Box<FlowError>,
    },
}

impl FlowError {
    pub(crate) fn at_level(self, level: usize) -> Self {
        FlowError::AtLevel {
            level,
            source: Box::new(self),
        }
    }

    /// The innermost error, with any time-level annotation stripped.
    pub fn root(&self) -> &FlowError {
        match self {
            FlowError::AtLevel { source, .. } => source.root(),
            other => other,
        }
    }
}
