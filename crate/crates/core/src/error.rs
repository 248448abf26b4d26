use thiserror::Error;

/// Errors raised by validation and the decomposition pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("bad shape: {0}")]
    BadShape(String),

    #[error("entry x_{l}^{j} has magnitude {magnitude:e}, at or below the zero threshold")]
    ZeroEntry { l: usize, j: usize, magnitude: f64 },

    #[error("total weight sum |x|^2 = {total} deviates from 1")]
    BadTrace { total: f64 },

    #[error("lambda_{l} = {lambda} is outside the open interval (0, 1)")]
    BadLambda { l: usize, lambda: f64 },

    #[error("non-finite component in input: {0}")]
    NonFinite(String),

    #[error("Hermitian eigensolver did not converge on a {dim}x{dim} matrix")]
    EigensolverFailure { dim: usize },

    #[error("state is not PPT (max relative minor residual {residual:e})")]
    NotPpt { residual: f64 },

    #[error("theta_{m} depends on the base index (deviation {deviation:e})")]
    InconsistentTheta { m: usize, deviation: f64 },

    #[error("s = {s} is outside 1..={max}")]
    BadS { s: usize, max: usize },

    #[error("sum of theta is {sum}, not a multiple of 2*pi (defect {defect:e})")]
    SumDefect { sum: f64, defect: f64 },

    #[error("entry rule and direct mixing disagree for Z_{l} (residual {residual:e})")]
    MixIdentityViolated { l: usize, residual: f64 },

    #[error("B_{l} is not rank one (relative residual {residual:e})")]
    RankOneFailure { l: usize, residual: f64 },

    #[error("decomposition failed verification: {0}")]
    VerificationFailed(String),

    #[error("invalid tolerances: {0}")]
    BadTolerances(String),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Stable machine-readable code for the error variant.
    pub fn code(&self) -> &'static str {
        match self {
            Error::BadShape(_) => "BadShape",
            Error::ZeroEntry { .. } => "ZeroEntry",
            Error::BadTrace { .. } => "BadTrace",
            Error::BadLambda { .. } => "BadLambda",
            Error::NonFinite(_) => "NonFinite",
            Error::EigensolverFailure { .. } => "EigensolverFailure",
            Error::NotPpt { .. } => "NotPPT",
            Error::InconsistentTheta { .. } => "InconsistentTheta",
            Error::BadS { .. } => "BadS",
            Error::SumDefect { .. } => "SumDefect",
            Error::MixIdentityViolated { .. } => "MixIdentityViolated",
            Error::RankOneFailure { .. } => "RankOneFailure",
            Error::VerificationFailed(_) => "VerificationFailed",
            Error::BadTolerances(_) => "BadTolerances",
            Error::Json(_) => "Json",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
