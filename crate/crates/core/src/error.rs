use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("unsupported manifold: {kind} of dimension {d}")]
    UnsupportedManifold { kind: String, d: usize },

    #[error("curvature bound K must be negative, got {0}")]
    NonNegativeCurvature(f64),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("grid too coarse: {0}")]
    GridTooCoarse(String),

    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("radius {r} is not below the injectivity radius {inj}")]
    RadiusTooLarge { r: f64, inj: f64 },

    #[error("degenerate neighbour configuration at grid point {0}")]
    DegenerateNeighbours(usize),

    #[error("code construction reached {achieved} words, needed {required}")]
    CodeTooSmall { achieved: usize, required: usize },

    #[error("shattering search over {0} points exceeds the 2^n guard")]
    TooManyPoints(usize),

    #[error("rank deficient basis: {0}")]
    RankDeficient(String),

    #[error("singular Gram matrix")]
    SingularGram,

    #[error("class evaluation failed: {0}")]
    Evaluation(String),

    #[error("empty input: {0}")]
    Empty(&'static str),
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
