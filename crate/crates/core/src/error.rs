use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid subsystem specification: {0}")]
    InvalidSpec(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("invalid subsystem index {index} (space has {count} subsystems)")]
    InvalidIndex { index: usize, count: usize },

    #[error("unsupported operation: {0}")]
    Unsupported(String),

    #[error("eigensolver failed: {0}")]
    Eigen(String),

    #[error("matrix is not Hermitian (max |M - M^H| = {0:e})")]
    NotHermitian(f64),

    #[error("not a valid density matrix: {0}")]
    InvalidDensity(String),

    #[error("space is missing subsystem {0}")]
    MissingSubsystem(String),

    #[error("basis state {0} is not part of the target space")]
    NotInSpace(String),

    #[error("reachable closure exceeded the cap of {0} states")]
    CapExceeded(usize),

    #[error("ambiguous eigenvalue clustering: gap {gap:e} is within twice the cluster width {width:e}")]
    AmbiguousClustering { gap: f64, width: f64 },

    #[error("degenerate structure: {0}")]
    Degenerate(String),

    #[error("mixing angle undefined: both drive amplitudes vanish")]
    UndefinedAngle,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("post-selected outcome has zero probability")]
    ZeroProbability,

    #[error("short-fiber condition violated: 2 L nu / (2 pi c) = {0} > 1")]
    LongFiber(f64),
}
