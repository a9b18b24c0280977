use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("vector norm {norm:e} is below {eps:e}")]
    DegenerateVector { norm: f64, eps: f64 },

    #[error("embedding row for token {token} is degenerate (norm {norm:e})")]
    DegenerateRow { token: usize, norm: f64 },

    #[error("superposition cancelled to norm {norm:e}")]
    DegenerateSuperposition { norm: f64 },

    #[error("matrix is not Hermitian (max deviation {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("projector Gram matrix is ill-conditioned (pivot {pivot:e} at column {column})")]
    IllConditionedProjector { column: usize, pivot: f64 },

    #[error("token id {id} out of range for vocabulary of size {size}")]
    TokenOutOfRange { id: usize, size: usize },

    #[error("sentence has no tokens")]
    EmptySentence,

    #[error("non-finite gradient in group `{group}` at coordinate {index}")]
    NonFiniteGradient { group: &'static str, index: usize },

    #[error("sentence {index}: {source}")]
    Sentence {
        index: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("{path}:{line}: {message}")]
    Parse {
        path: String,
        line: usize,
        message: String,
    },

    #[error("checkpoint incompatible: {0}")]
    Checkpoint(String),

    #[error("{context}: {source}")]
    Io {
        context: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub fn io(context: impl Into<String>, source: std::io::Error) -> Self {
        Error::Io {
            context: context.into(),
            source,
        }
    }

    /// Attaches the position of the offending sentence.
    pub fn in_sentence(self, index: usize) -> Self {
        Error::Sentence {
            index,
            source: Box::new(self),
        }
    }

    /// True for failures that come from the numerics rather than from input or configuration.
    pub fn is_numeric(&self) -> bool {
        match self {
            Error::DegenerateVector { .. }
            | Error::DegenerateRow { .. }
            | Error::DegenerateSuperposition { .. }
            | Error::NotHermitian { .. }
            | Error::IllConditionedProjector { .. }
            | Error::NonFiniteGradient { .. } => true,
            Error::Sentence { source, .. } => source.is_numeric(),
            _ => false,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
