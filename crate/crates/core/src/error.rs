use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("sample count must be at least 1")]
    EmptySample,

    #[error("domain error: {0}")]
    Domain(String),

    #[error("automation never pays back: per-output manual cost {manual} does not exceed inference cost {inference}")]
    NeverPaysBack { manual: f64, inference: f64 },

    #[error("threshold undefined: detection penalty is zero")]
    UndefinedThreshold,

    #[error("new model is never cheaper than competitor `{competitor}`")]
    NeverViable { competitor: String },

    #[error("no sign change on bracket [{lo}, {hi}]")]
    Bracket { lo: f64, hi: f64 },

    #[error("simulation unsupported for manual option `{0}`")]
    UnsupportedSimulation(String),

    #[error("scenario syntax error at `{path}`: {message}")]
    Syntax { path: String, message: String },

    #[error("invalid scenario value at `{path}`: {message}")]
    Invalid { path: String, message: String },

    #[error("table schema mismatch: {0}")]
    Schema(String),

    #[error("i/o error on `{path}`: {message}")]
    Io { path: String, message: String },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn invalid(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Invalid {
            path: path.into(),
            message: message.into(),
        }
    }

    /// Process exit code: 2 for scenario validation failures, 3 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Syntax { .. } | Error::Invalid { .. } | Error::Io { .. } => 2,
            _ => 3,
        }
    }
}
