use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix has non-finite entries")]
    NonFinite,

    #[error("matrix is not Hermitian (deviation {deviation:.3e} > {tolerance:.3e})")]
    NotHermitian { deviation: f64, tolerance: f64 },

    #[error("matrix is not positive semidefinite (min eigenvalue {0:.3e})")]
    NotPsd(f64),

    #[error("invalid density matrix: {0}")]
    InvalidState(String),

    #[error("Bloch vector outside the unit ball (norm {0})")]
    InvalidBloch(f64),

    #[error("invalid channel: {0}")]
    InvalidChannel(String),

    #[error("solver hit the iteration cap ({iterations} iterations, primal residual {primal:.3e}, dual residual {dual:.3e}, gap {gap:.3e})")]
    SolverMaxIter {
        iterations: usize,
        primal: f64,
        dual: f64,
        gap: f64,
    },

    #[error("problem is infeasible: {0}")]
    Infeasible(String),

    #[error("malformed problem: {0}")]
    BadProblem(String),

    #[error("process-matrix convention resolution failed (best fidelity {0:.4})")]
    ConventionResolution(f64),

    #[error("Kraus operators do not match the two-branch circuit pattern: {0}")]
    PatternMismatch(String),

    #[error("angle solve residual {0:.3e} exceeds tolerance (inconsistent target)")]
    AngleResidual(f64),

    #[error("routing collision: modes {0} and {1} both map to output mode {2}")]
    RoutingCollision(usize, usize, usize),

    #[error("no route for occupied input mode {0}")]
    UnroutedMode(usize),

    #[error("measurement basis set is underdetermined")]
    Underdetermined,

    #[error("optimization failed: {0}")]
    OptimizationFailed(String),

    #[error("unknown convention tag: {0}")]
    UnknownConvention(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
