use thiserror::Error;

/// Failures reported by the numerical routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("vectors are linearly dependent (smallest singular value {smallest_singular_value:e})")]
    RankDeficient { smallest_singular_value: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: String, found: String },

    #[error("invalid dimensions: {0}")]
    BadDimensions(String),

    #[error("sphere of directions is degenerate: polar angle {polar_angle} is not below pi/2")]
    DegenerateSphere { polar_angle: f64 },

    #[error("length mismatch: expected {expected} entries, found {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("frequency vector is zero")]
    ZeroFrequency,

    #[error("grid point {min_eta} is below twice the net separation {separation}")]
    GridBelowResolution { min_eta: f64, separation: f64 },

    #[error("insufficient grid: {0}")]
    InsufficientGrid(String),

    #[error("bad parameters: {0}")]
    BadParameters(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
