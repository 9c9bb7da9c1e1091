use std::path::PathBuf;

/// Errors produced by the evaluation pipeline.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Two inputs that must share a shape do not.
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    /// The input admits no pair to evaluate (or no member to pool).
    #[error("degenerate input: {0}")]
    Degenerate(String),

    /// A pixel coordinate falls outside the label map.
    #[error("pixel ({row}, {col}) is outside a {width}x{height} map")]
    OutOfBounds {
        row: usize,
        col: usize,
        width: usize,
        height: usize,
    },

    /// A numeric argument lies outside its admissible range.
    #[error("value out of domain: {0}")]
    Domain(String),

    /// Sampling constants violate `0 < beta < alpha`.
    #[error("invalid sampling parameters: {0}")]
    Parameter(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    /// A `.seg` body leaves a pixel uncovered or covers one twice.
    #[error("coverage error: {0}")]
    Coverage(String),

    #[error("unrecognized format: {0}")]
    Format(String),

    /// Work would exceed the configured size guard.
    #[error("resource limit: {0}")]
    Resource(String),

    #[error("{}: {source}", path.display())]
    File {
        path: PathBuf,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }

    /// Attaches a file path to an error raised while reading that file.
    pub fn in_file(self, path: impl Into<PathBuf>) -> Self {
        Error::File {
            path: path.into(),
            source: Box::new(self),
        }
    }

    /// True for errors caused by caller-supplied parameters rather than data.
    pub fn is_usage(&self) -> bool {
        match self {
            Error::Parameter(_) | Error::Domain(_) | Error::Resource(_) => true,
            Error::File { source, .. } => source.is_usage(),
            _ => false,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
