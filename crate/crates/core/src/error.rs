use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("truncation mass {mass:e} underflows for [{lower}, {upper}] with mean {mu}")]
    DegenerateTruncation {
        lower: f64,
        upper: f64,
        mu: f64,
        mass: f64,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("focused set is empty")]
    EmptyFocusedSet,

    #[error("relevant set is empty")]
    EmptyRelevantSet,

    #[error("zero exposure association for SNP {0}")]
    ZeroDenominator(String),

    #[error("regression design is rank deficient: {0}")]
    RankDeficient(String),

    #[error("{path}:{line}: {message}")]
    Parse {
        path: String,
        line: usize,
        message: String,
    },

    #[error("{path}:{line}: duplicate variant {id}")]
    DuplicateVariant { path: String, line: usize, id: String },

    #[error("{path}:{line}: non-positive standard error {se} for {id}")]
    NonPositiveSe {
        path: String,
        line: usize,
        id: String,
        se: f64,
    },

    #[error("exposure and outcome files share no usable variants")]
    EmptyIntersection,

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for failures caused by numerics rather than by the inputs.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::DegenerateTruncation { .. } | Error::RankDeficient(_) | Error::ZeroDenominator(_)
        )
    }
}
