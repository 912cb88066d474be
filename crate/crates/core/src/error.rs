use nalgebra::Complex;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid matrix: {0}")]
    InvalidMatrix(String),

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("invalid argument: {0}")]
    Domain(String),

    #[error("exp(tA) overflows the floating-point range at t = {t}")]
    Overflow { t: f64 },

    #[error("eigenvalue iteration did not converge within {iterations} iterations")]
    NoConvergence { iterations: usize },

    #[error("point {point} lies within {distance:e} of the spectrum")]
    NearSpectrum { point: Complex<f64>, distance: f64 },

    #[error(
        "eigenvalue cluster at {eigenvalue} is defective \
         (algebraic multiplicity {algebraic}, geometric {geometric})"
    )]
    Defective {
        eigenvalue: Complex<f64>,
        algebraic: usize,
        geometric: usize,
    },

    #[error("eigenvalue cluster at {eigenvalue} has multiplicity {multiplicity}, expected a simple eigenvalue")]
    NotSimple {
        eigenvalue: Complex<f64>,
        multiplicity: usize,
    },

    #[error("eigenvalue cluster at {eigenvalue} is separated from the rest of the spectrum by only {gap:e}")]
    NotSeparated { eigenvalue: Complex<f64>, gap: f64 },

    #[error("spectral bound {spb} is not attained by a real eigenvalue")]
    SpectralBoundNotEigenvalue { spb: f64 },

    #[error("no rank-one limit: {0}")]
    NoRankOneLimit(String),

    #[error("dimension {dim} exceeds the brute-force cap {cap}")]
    Capacity { dim: usize, cap: usize },

    #[error("singular linear system: {0}")]
    Singular(String),

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Errors raised by the numerical kernel rather than by the input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Overflow { .. }
                | Error::NoConvergence { .. }
                | Error::NearSpectrum { .. }
                | Error::Defective { .. }
                | Error::NotSimple { .. }
                | Error::NotSeparated { .. }
                | Error::SpectralBoundNotEigenvalue { .. }
                | Error::NoRankOneLimit(_)
                | Error::Singular(_)
        )
    }
}
