use thiserror::Error;

/// Errors raised by the SISI operator library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("parameter `{name}` must be a finite nonnegative real, got {value}")]
    InvalidParameter { name: &'static str, value: f64 },

    #[error("point {0:?} is not on the 3-simplex")]
    NotInSimplex([f64; 4]),

    #[error("iterate left the simplex: {point:?}")]
    LeftSimplex { point: [f64; 4] },

    #[error("degenerate parameters: {0}")]
    DegenerateParameters(String),

    #[error("force value {force} is not a root of the fixed-point equation (|k1 u + k2 v - A| = {mismatch:e})")]
    InconsistentRoot { force: f64, mismatch: f64 },

    #[error("eigenvalue iteration did not converge within {0} sweeps")]
    ConvergenceFailure(usize),

    #[error("precondition violated: {0}")]
    PreconditionViolated(String),

    #[error("point is not a fixed point (residual {residual:e})")]
    NotAFixedPoint { residual: f64 },

    #[error("invalid scenario configuration: {0}")]
    InvalidScenarioConfig(String),
}

pub type Result<T> = std::result::Result<T, Error>;
