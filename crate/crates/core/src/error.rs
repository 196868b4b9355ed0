use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,
    #[error("field element or vector does not match the field: {0}")]
    SpecMismatch(String),
    #[error("invalid field: {0}")]
    InvalidField(String),
    #[error("field F_{p}^{m} is too large for table arithmetic")]
    FieldTooLarge { p: u32, m: u32 },
    #[error("zero polynomial")]
    ZeroPolynomial,
    #[error("ambient dimensions differ ({0} vs {1})")]
    AmbientMismatch(usize, usize),
    #[error("vector is not in the span")]
    NotInSpan,
    #[error(
        "Hilbert function mismatch in degree {degree}: expected {expected}, observed {observed}"
    )]
    HilbertMismatch {
        degree: usize,
        expected: usize,
        observed: usize,
    },
    #[error("insufficient points: need {needed}, have {have}")]
    InsufficientPoints { needed: usize, have: usize },
    #[error("graded piece of degree {0} unavailable")]
    DegreeUnavailable(i64),
    #[error("parametrization is rank deficient (rank {rank}, rows {rows})")]
    RankDeficientParametrization { rank: usize, rows: usize },
    #[error("retries exhausted: {0}")]
    RetriesExhausted(String),
    #[error("degenerate random draw: {0}")]
    Degenerate(String),
    #[error("space of conics through the nodes has dimension {0}, expected 2")]
    ConicSpaceDegenerate(usize),
    #[error("special subspace has dimension {0}, expected 3")]
    SpecialtyViolation(usize),
    #[error("Koszul differentials do not compose to zero at (p, q) = ({p}, {q})")]
    ComplexDefect { p: i64, q: i64 },
    #[error("model file format version {found} is not supported (expected {expected})")]
    FormatVersionMismatch { found: u32, expected: u32 },
    #[error("malformed file: {0}")]
    MalformedFile(String),
    #[error("characteristic {p} is below the bound {bound} required by suite {suite}")]
    BelowCharacteristicBound { suite: String, p: u32, bound: u32 },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for failures caused by an unlucky random draw or too small a
    /// field, which a caller can cure with a new seed or a field extension.
    pub fn is_retryable(&self) -> bool {
        matches!(
            self,
            Error::HilbertMismatch { .. }
                | Error::InsufficientPoints { .. }
                | Error::RetriesExhausted(_)
                | Error::Degenerate(_)
                | Error::SpecialtyViolation(_)
                | Error::RankDeficientParametrization { .. }
                | Error::NotInSpan
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
