use thiserror::Error;

/// Errors raised by the model, the solvers and the sweep front end.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A parameter set violates one of its invariants.
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    /// The drift matrix has an eigenvalue with real part at or above `-margin`.
    #[error("no steady state: drift matrix is not asymptotically stable (max Re λ = {max_real_part:.6e})")]
    Unstable { max_real_part: f64 },

    /// A linear solve hit an (almost) singular system.
    #[error("singular linear system in {context}: {detail}")]
    Singular { context: &'static str, detail: String },

    /// An iterative or eigenvalue routine failed, or a result check did not hold.
    #[error("numerical failure: {0}")]
    Numerical(String),

    /// The fixed integration step is too large for the drift matrix.
    #[error("step size too large: dt·‖A‖ = {product:.4} exceeds {limit}; use dt ≤ {suggested_dt:.6e} s")]
    StepSize {
        product: f64,
        limit: f64,
        suggested_dt: f64,
    },

    /// A configuration file, override or sweep description could not be understood.
    #[error("configuration error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
