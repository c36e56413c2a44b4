use thiserror::Error;

/// Errors raised by the solver, the diagnostics and the command-line harness.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("non-finite value in {term} at t = {t}")]
    NonFinite { term: String, t: f64 },

    #[error("time step {dt} violates the CFL limit {limit}")]
    Cfl { dt: f64, limit: f64 },

    #[error("positivity violated: {field} reached {value} (tolerance {tolerance}) at t = {t}")]
    Positivity {
        field: &'static str,
        value: f64,
        tolerance: f64,
        t: f64,
    },

    #[error("saturation: {0}")]
    Saturation(String),

    #[error("run aborted after last good time t = {last_good_t}: {source}")]
    RunAborted {
        last_good_t: f64,
        #[source]
        source: Box<Error>,
    },

    #[error("config line {line}, key `{key}`: {msg}")]
    Config {
        line: usize,
        key: String,
        msg: String,
    },

    #[error("malformed snapshot: {0}")]
    Snapshot(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for failures of the numerics (blow-up, positivity loss) as opposed
    /// to bad input.
    pub fn is_numerical(&self) -> bool {
        match self {
            Error::NonFinite { .. } | Error::Positivity { .. } | Error::Cfl { .. } => true,
            Error::RunAborted { source, .. } => source.is_numerical(),
            _ => false,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}
