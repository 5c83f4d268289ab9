use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("integration failure at t = {time:.6} us: {reason}")]
    IntegrationFailure { time: f64, reason: String },

    #[error("degenerate configuration: {0} (perturb the parameters slightly)")]
    Degenerate(String),

    #[error("unsupported regime: {0}")]
    UnsupportedRegime(String),

    #[error("constraint-infeasible: {0}")]
    Infeasible(String),

    #[error("config error{}: {message}", line_suffix(*.line))]
    Config { line: usize, message: String },

    #[error("i/o failure: {0}")]
    Io(#[from] std::io::Error),

    #[error("serialization failure: {0}")]
    Serialization(#[from] serde_json::Error),
}

fn line_suffix(line: usize) -> String {
    if line > 0 {
        format!(" (line {line})")
    } else {
        String::new()
    }
}

impl Error {
    pub(crate) fn config(line: usize, message: impl Into<String>) -> Self {
        Error::Config { line, message: message.into() }
    }

    /// Process exit code for the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config { .. } | Error::InvalidInput(_) => 2,
            Error::IntegrationFailure { .. }
            | Error::Degenerate(_)
            | Error::UnsupportedRegime(_)
            | Error::Infeasible(_) => 3,
            Error::Io(_) | Error::Serialization(_) => 4,
        }
    }
}
