use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A physical parameter lies outside its admissible domain.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("mixing angle undefined: coupling and detuning are both zero")]
    UndefinedAngle,

    #[error("adiabaticity ratio singular at t = {t:e} s (coupling and detuning both zero)")]
    Singularity { t: f64 },

    #[error("efficiency undefined: {0}")]
    UndefinedEfficiency(String),

    #[error("integration failed at t = {t:e} s: {reason}")]
    Integration { t: f64, reason: String },

    #[error("not applicable: {0}")]
    NotApplicable(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
