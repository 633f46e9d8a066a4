use thiserror::Error;

/// Errors raised across the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("quadrature did not converge: estimate error {error:.3e} exceeds tolerance {tolerance:.3e}")]
    NonConvergence { error: f64, tolerance: f64 },

    #[error("pole of the Gamma function at {0}")]
    Pole(f64),

    #[error("unknown hypergroup instance `{0}`")]
    UnknownInstance(String),

    #[error("Frobenius start requires gamma > -1/2, got {0}")]
    SingularStart(f64),

    #[error("ODE step control failed at x = {x}: {reason}")]
    StepFailure { x: f64, reason: String },

    #[error("spectral parameter {re}{im:+}i lies outside the strip |Im| <= {omega}")]
    StripViolation { re: f64, im: f64, omega: f64 },

    #[error("Plancherel normalization is not calibrated for instance `{0}`")]
    NormalizationUnset(String),

    #[error("eigenvalue {re}{im:+}i lies outside the strip |Im| <= {omega}")]
    SpectrumOutsideStrip { re: f64, im: f64, omega: f64 },

    #[error("matrix argument norm {0:.3e} exceeds the scaling budget")]
    OverflowRisk(f64),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// True for failures of a numerical method (as opposed to bad input).
    pub fn is_numeric(&self) -> bool {
        matches!(
            self,
            Error::NonConvergence { .. }
                | Error::StepFailure { .. }
                | Error::OverflowRisk(_)
                | Error::Pole(_)
        )
    }
}
