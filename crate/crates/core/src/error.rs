use thiserror::Error;

/// Errors raised by geometry, weighting, estimation and the experiment harness.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("points are (nearly) antipodal, logarithm is undefined")]
    AntipodalPoints,

    #[error("point does not belong to the metric space {0}")]
    SpaceMismatch(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("near-singular design matrix (smallest eigenvalue {min_eigen:e})")]
    NearSingularDesign { min_eigen: f64 },

    #[error("singular design matrix")]
    SingularDesign,

    #[error("no observations with positive kernel weight around t = {t}")]
    EmptyWindow { t: f64 },

    #[error("N ≥ n: {n_terms} basis functions for {n} observations")]
    TooManyTerms { n_terms: usize, n: usize },

    #[error("weights sum to {0:e}, the weighted mean is undefined")]
    DegenerateWeights(f64),

    #[error("every candidate failed: {}", .0.join("; "))]
    AllCandidatesFailed(Vec<String>),

    #[error("unsupported: {0}")]
    Unsupported(String),
}

impl Error {
    /// Short machine-friendly name of the variant, used for CLI diagnostics.
    pub fn name(&self) -> &'static str {
        match self {
            Error::DimensionMismatch { .. } => "DimensionMismatch",
            Error::LengthMismatch { .. } => "LengthMismatch",
            Error::AntipodalPoints => "AntipodalPoints",
            Error::SpaceMismatch(_) => "SpaceMismatch",
            Error::InvalidArgument(_) => "InvalidArgument",
            Error::NearSingularDesign { .. } => "NearSingularDesign",
            Error::SingularDesign => "SingularDesign",
            Error::EmptyWindow { .. } => "EmptyWindow",
            Error::TooManyTerms { .. } => "TooManyTerms",
            Error::DegenerateWeights(_) => "DegenerateWeights",
            Error::AllCandidatesFailed(_) => "AllCandidatesFailed",
            Error::Unsupported(_) => "Unsupported",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
