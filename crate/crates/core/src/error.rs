use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Failure modes shared by every module.
///
/// [`Error::category`] groups them the way the command-line front end
/// reports them (bad input, numerical non-convergence, physics domain).
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("frequency {omega} outside tabulated range [{min}, {max}]")]
    Range { omega: f64, min: f64, max: f64 },

    #[error("singular mirror model: {0}")]
    SingularModel(String),

    #[error(
        "quadrature did not converge after {evaluations} evaluations \
         (partial value {partial}, error estimate {abs_error:e})"
    )]
    Convergence {
        partial: f64,
        abs_error: f64,
        evaluations: usize,
    },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("spectrum kind mismatch: expected {expected}, found {found}")]
    KindMismatch {
        expected: &'static str,
        found: &'static str,
    },

    #[error("light-like momentum (k^2 = {k2:e}); projector undefined")]
    LightLike { k2: f64 },

    #[error("impedance has a pole at omega = 0 for a bound oscillator")]
    Pole,

    #[error("admittance denominator vanishes near omega = {omega} (|D| = {magnitude:e})")]
    ResonanceSingularity { omega: f64, magnitude: f64 },

    #[error("no high-frequency cut-off: {0}")]
    NoCutoff(String),

    #[error(
        "contour passes within {min_modulus:e} of a zero near z = {near}; \
         perturb the contour radius"
    )]
    ContourDegeneracy { min_modulus: f64, near: String },

    #[error("pole count depends on contour radius: {count_r} at R = {radius}, {count_2r} at 2R")]
    RadiusSensitive {
        radius: f64,
        count_r: i64,
        count_2r: i64,
    },

    #[error("tabulated mirror has no analytic continuation off the real axis")]
    NoContinuation,

    #[error("grid coverage insufficient: {0}")]
    Coverage(String),

    #[error("noise decomposition failed: {0}")]
    Decomposition(String),
}

/// Coarse classification of an [`Error`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorCategory {
    Input,
    Convergence,
    Physics,
}

impl Error {
    pub fn category(&self) -> ErrorCategory {
        match self {
            Error::Argument(_) | Error::Range { .. } | Error::KindMismatch { .. } => {
                ErrorCategory::Input
            }
            Error::Convergence { .. } | Error::Coverage(_) | Error::RadiusSensitive { .. } => {
                ErrorCategory::Convergence
            }
            _ => ErrorCategory::Physics,
        }
    }

    pub(crate) fn arg(msg: impl Into<String>) -> Self {
        Error::Argument(msg.into())
    }
}
