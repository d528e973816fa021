use std::fmt;

/// Failure classes, each with its own exit code.
#[derive(Debug)]
pub enum CliError {
    /// Bad flags or descriptors.
    Usage(String),
    /// The numerics failed on valid input.
    Numeric(tomokit::Error),
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Numeric(_) => 3,
            CliError::Io(_) => 1,
        }
    }

    /// Machine-readable form written to stderr for numeric failures.
    pub fn to_json(&self) -> String {
        let (class, kind, message) = match self {
            CliError::Usage(m) => ("usage", "usage", m.clone()),
            CliError::Numeric(e) => ("numeric", error_kind(e), e.to_string()),
            CliError::Io(m) => ("io", "io", m.clone()),
        };
        serde_json::json!({ "error": class, "kind": kind, "message": message }).to_string()
    }
}

fn error_kind(e: &tomokit::Error) -> &'static str {
    use tomokit::Error::*;
    match e {
        GammaPole(_) => "gamma_pole",
        NonConvergence { .. } => "non_convergence",
        Domain(_) => "domain",
        DegenerateFrame { .. } => "degenerate_frame",
        UnsupportedFrame(_) => "unsupported_frame",
        UnsupportedModel(_) => "unsupported_model",
        Quadrature(_) => "quadrature",
        DivergentNormalizer { .. } => "divergent_normalizer",
        FrameMismatch { .. } => "frame_mismatch",
        InvalidParameter(_) => "invalid_parameter",
        Parse(_) => "parse",
        Io(_) => "io",
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage: {m}"),
            CliError::Numeric(e) => write!(f, "numeric failure: {e}"),
            CliError::Io(m) => write!(f, "i/o: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

/// Input errors from the library count as usage errors.
impl From<tomokit::Error> for CliError {
    fn from(e: tomokit::Error) -> Self {
        use tomokit::Error::*;
        match e {
            Parse(m) => CliError::Usage(m),
            InvalidParameter(m) => CliError::Usage(m),
            DegenerateFrame { mu, nu } => CliError::Usage(format!("degenerate frame ({mu}, {nu})")),
            Io(m) => CliError::Io(m),
            other => CliError::Numeric(other),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
