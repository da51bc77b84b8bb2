use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unsupported tensor shape: dim {dim}, rank {rank}")]
    UnsupportedShape { dim: usize, rank: usize },
    #[error("rank mismatch: expected {expected}, got {got}")]
    RankMismatch { expected: usize, got: usize },
    #[error("dimension mismatch: {0} vs {1}")]
    DimMismatch(usize, usize),
    #[error("wedge rank overflow: {k} + {l} exceeds dimension {dim}")]
    WedgeOverflow { k: usize, l: usize, dim: usize },
    #[error("curvature symmetry violated: residual {0:e}")]
    SymmetryViolation(f64),
    #[error("input is not symmetric: residual {0:e}")]
    NotSymmetric(f64),
    #[error("input is not antisymmetric: residual {0:e}")]
    NotAntisymmetric(f64),
    #[error("degenerate 2-plane: squared area {0:e}")]
    DegeneratePlane(f64),
    #[error("operator leaks out of subspace: leak {0:e} exceeds {1:e}")]
    SubspaceLeak(f64, f64),
    #[error("operator matrix is not symmetric: residual {0:e}")]
    OperatorNotSymmetric(f64),
    #[error("eigensolver failed")]
    EigenFailure,
    #[error("spectral reconstruction residual {0:e} exceeds tolerance")]
    SpectralResidual(f64),
    #[error("curvature is not Einstein: residual {0:e}")]
    NotEinstein(f64),
    #[error("inconsistent sectional bounds: lower {0} exceeds upper {1}")]
    InconsistentSectionalBounds(f64, f64),
    #[error("Einstein constant {k} incompatible with sectional bounds [{delta}, {delta_cap}] in dimension {n}")]
    EinsteinSandwichViolated {
        k: f64,
        delta: f64,
        delta_cap: f64,
        n: usize,
    },
    #[error("empty interval intersection: [{0}, {1}] and [{2}, {3}]")]
    EmptyIntersection(f64, f64, f64, f64),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("structure identity failed: {label} residual {residual:e}")]
    StructureIdentity { label: String, residual: f64 },
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("expected eigenspace of dimension {expected} at {value}, found {found}")]
    EigenspaceDimension {
        value: f64,
        expected: usize,
        found: usize,
    },
    #[error("unknown space id: {0}")]
    UnknownSpace(String),
    #[error("subspace {0} is not available for this space")]
    SubspaceUnavailable(String),
    #[error("invalid structure constants: {0}")]
    InvalidStructureConstants(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}
