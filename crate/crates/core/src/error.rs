use thiserror::Error;

/// Errors raised by the physical model, estimators, controller and harness.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument fell outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// Pitch too close to ±π/2 for the Z-Y-X Euler parametrization.
    #[error("Euler-angle singularity: |theta| = {theta:.6} rad is within the gimbal-lock guard")]
    Singularity { theta: f64 },
    /// A state or measurement contained NaN or infinity.
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),
    /// The position loop asked for a force the rotors cannot point along.
    #[error("infeasible attitude: desired force z-component {fz:.6} N is not positive")]
    InfeasibleAttitude { fz: f64 },
    /// The assembled inertia tensor lost positive definiteness.
    #[error("inertia tensor is not positive definite: {0}")]
    Inertia(String),
    /// A scenario configuration could not be parsed.
    #[error("config parse error: {0}")]
    ConfigParse(String),
    /// A scenario configuration parsed but violates an invariant.
    #[error("config error at `{path}`: {message}")]
    Config { path: String, message: String },
    /// The closed-loop simulation left the valid state space.
    #[error("simulation diverged at tick {tick} (t = {time:.3} s): {reason}")]
    Divergence { tick: usize, time: f64, reason: String },
    /// Two logs cannot be compared, or a log does not match the expected layout.
    #[error("log schema error: {0}")]
    Schema(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
