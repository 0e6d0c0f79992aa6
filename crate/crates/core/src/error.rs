use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("fields live on different grids")]
    GridMismatch,

    #[error("component count mismatch: expected {expected}, got {got}")]
    ComponentMismatch { expected: usize, got: usize },

    #[error("symbol singular at zero frequency")]
    SingularSymbol,

    #[error("drift required for Fredholm bound (b = 0 leaves |lambda| with infimum 0)")]
    DriftRequired,

    #[error("zero-mode not representable: component {component} has relative zero-bin content {relative:.3e}")]
    ZeroModeNotRepresentable { component: usize, relative: f64 },

    #[error("inverse transform left imaginary residue {residue:.3e} (relative); input is not conjugate-symmetric")]
    NonRealResult { residue: f64 },

    #[error("invalid problem:\n  - {}", .0.join("\n  - "))]
    InvalidProblem(Vec<String>),

    #[error("degenerate contraction constants: {0}")]
    DegenerateConstants(String),

    #[error("trivial problem: residual reference scale is zero")]
    TrivialProblem,

    #[error("continuity pair rejected: {0}")]
    IncompatibleNonlinearities(String),

    #[error("epsilon sweep needs at least one value")]
    EmptySweep,

    #[error("epsilon {eps:.17e} exceeds the admissibility threshold rho*C/(M*K*(|u0|+1)) = {threshold:.17e}")]
    EpsilonAboveThreshold { eps: f64, threshold: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("problem file: {0}")]
    Toml(#[from] toml::de::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
