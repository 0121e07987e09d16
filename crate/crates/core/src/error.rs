use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{0} must be finite")]
    NonFinite(&'static str),

    #[error("kappa must be positive")]
    NonPositiveKappa,

    #[error("gamma must be non-negative")]
    NegativeGamma,

    #[error("{field}: {reason}")]
    Invalid { field: &'static str, reason: String },

    #[error("scattering matrix is not passive (largest singular value {0})")]
    NotPassive(f64),

    #[error(
        "EP classification needs beta1 == beta2 (got {beta1} and {beta2}); use supermodes for the general spectrum"
    )]
    NonDegenerateBeta { beta1: f64, beta2: f64 },

    #[error("intrinsic loss and explicit reservoir are mutually exclusive")]
    IntrinsicLossWithReservoir,

    #[error("tridiagonal eigensolver did not converge at index {0}")]
    NoConvergence(usize),

    #[error("csv line {line}: {reason}")]
    Csv { line: usize, reason: String },
}

impl Error {
    pub(crate) fn invalid(field: &'static str, reason: impl Into<String>) -> Self {
        Error::Invalid {
            field,
            reason: reason.into(),
        }
    }
}
