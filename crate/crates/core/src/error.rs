use thiserror::Error;

/// Errors raised by the numerical routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("pole of the gamma function at z = {0}")]
    GammaPole(f64),

    #[error("series did not converge within {terms} terms (last relative term {last_rel:e})")]
    NonConvergence { terms: usize, last_rel: f64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("degenerate frame: mu = {mu}, nu = {nu}")]
    DegenerateFrame { mu: f64, nu: f64 },

    #[error("closed form unavailable for this frame: {0}")]
    UnsupportedFrame(String),

    #[error("model not supported by this path: {0}")]
    UnsupportedModel(String),

    #[error("quadrature failed: {0}")]
    Quadrature(String),

    #[error("normalizer diverges at eta = {eta:?}")]
    DivergentNormalizer { eta: Vec<f64> },

    #[error("provider recorded at frame ({rec_mu}, {rec_nu}) evaluated at ({mu}, {nu})")]
    FrameMismatch { rec_mu: f64, rec_nu: f64, mu: f64, nu: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
