use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("dimension mismatch in {context}: expected {expected}, found {found}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("non-invertible base point: {0}")]
    NonInvertibleBase(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("input is not a cocycle: {0}")]
    NotCocycle(String),

    #[error("section is not regular on U_{simplex:?}: {detail}")]
    IrregularSection { simplex: Vec<usize>, detail: String },

    #[error("window incomplete: windowed computation found {computed}, closed form gives {expected}")]
    WindowIncomplete { computed: usize, expected: u64 },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("parse error at {path}: {message}")]
    Parse { path: String, message: String },
}

impl Error {
    pub(crate) fn mismatch(context: &'static str, expected: usize, found: usize) -> Self {
        Error::DimensionMismatch {
            context,
            expected,
            found,
        }
    }

    /// Usage-level errors map to CLI exit code 2; everything else is computational.
    pub fn is_usage(&self) -> bool {
        matches!(
            self,
            Error::DimensionMismatch { .. }
                | Error::InvalidArgument(_)
                | Error::Unsupported(_)
                | Error::Parse { .. }
        )
    }
}
