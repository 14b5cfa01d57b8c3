use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("graph has no vertices")]
    NoVertices,
    #[error("duplicate vertex id `{0}`")]
    DuplicateVertex(String),
    #[error("duplicate edge id `{0}`")]
    DuplicateEdge(String),
    #[error("edge `{edge}` references unknown vertex `{vertex}`")]
    DanglingEndpoint { edge: String, vertex: String },
    #[error("edge `{edge}` has invalid length {length} (must be finite and > 0)")]
    InvalidLength { edge: String, length: f64 },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("P is not an orthogonal projector (defect {defect:.3e})")]
    NotProjector { defect: f64 },
    #[error("L is not hermitian (defect {defect:.3e})")]
    NotHermitian { defect: f64 },
    #[error("L is not supported on ran P-perp (defect ‖P⊥LP⊥ − L‖ = {defect:.3e})")]
    NotSupportedOnPPerp { defect: f64 },
    #[error("matrix is not normal (defect {defect:.3e})")]
    NotNormal { defect: f64 },
    #[error("unknown vertex `{0}` in conditions")]
    UnknownVertex(String),
    #[error("vertex `{vertex}` has degree {degree} but its block is {size}×{size}")]
    BlockSize {
        vertex: String,
        degree: usize,
        size: usize,
    },
    #[error("vertex `{0}` has more than one condition block")]
    DuplicateBlock(String),
    #[error("vertex `{0}` has no condition block")]
    MissingBlock(String),

    #[error("k = {k} is a pole of the scattering matrix (eigenvalue {mu} of L)")]
    Pole { k: String, mu: f64 },
    #[error("operation requires a compact graph (no external edges)")]
    NotCompact,
    #[error("{0} must be positive and finite")]
    InvalidParameter(&'static str),
    #[error("winding number unstable over {halvings} radius halvings (last value {last})")]
    WindingUnstable { halvings: usize, last: f64 },
    #[error("fast zero-mode solver inapplicable: tau_max = {tau} >= 1")]
    FastSolverInapplicable { tau: f64 },
    #[error("eigenpair residual {residual:.3e} too large")]
    EigenpairResidual { residual: f64 },
    #[error("expected {expected} new lengths, got {got}")]
    LengthCount { expected: usize, got: usize },
    #[error("tau_max of the {flavor} closure stayed at {tau} >= 1 after {doublings} length doublings")]
    ClosureTau {
        flavor: &'static str,
        tau: f64,
        doublings: usize,
    },
    #[error("Schur decomposition did not converge")]
    SchurFailed,
    #[error("singular matrix")]
    Singular,
}

pub type Result<T> = std::result::Result<T, Error>;
