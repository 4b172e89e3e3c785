use std::path::PathBuf;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("axis {axis} out of range for a {dim}-dimensional grid")]
    InvalidAxis { axis: usize, dim: usize },
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("degenerate director: |d| = {magnitude:e} at grid point {index}")]
    DegenerateDirector { index: usize, magnitude: f64 },
    #[error("non-finite value at t = {t}; suspected blow-up or under-resolution")]
    Overflow { t: f64 },
    #[error("invalid time step {0}")]
    InvalidTimeStep(f64),
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },
    #[error("mode {k} is not resolved on a grid with {res} points per axis")]
    UnderResolved { k: i64, res: usize },
    #[error("history times are not ordered at record {0}")]
    UnorderedHistory(usize),
    #[error("empty history")]
    EmptyHistory,
    #[error(
        "Gronwall envelope undefined: controlled norms grow at t = {t} while the monitor is zero"
    )]
    EnvelopeUndefined { t: f64 },
    #[error("snapshot format error: {0}")]
    Format(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Config(#[from] ConfigError),
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ConfigError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("`{key}`: {message}")]
    Range { key: String, message: String },
    #[error("missing required key `{0}`")]
    Missing(&'static str),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
