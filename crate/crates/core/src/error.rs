use thiserror::Error;

/// Errors raised by the field, block and solver operations.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("grid size {0} must be a power of two and at least 8")]
    InvalidGridSize(usize),
    #[error("expected {expected} samples, got {got}")]
    SampleCount { expected: usize, got: usize },
    #[error("expected a {expected} field, got {got} component(s)")]
    ComponentMismatch { expected: &'static str, got: usize },
    #[error("fields live on different grids ({0} vs {1})")]
    GridMismatch(usize, usize),
    #[error("vorticity has nonzero mean mode (|v(0)| = {0:e}); no periodic velocity exists")]
    NonzeroMean(f64),
    #[error("block index {q} outside [-1, {q_max}]")]
    BlockOutOfRange { q: i32, q_max: i32 },
    #[error("block {0} is identically zero; Bernstein ratio undefined")]
    ZeroBlock(i32),
    #[error("cutoff sharpness must be finite and >= 1, got {0}")]
    InvalidSharpness(f64),
    #[error("exponent p must exceed 1, got {0}")]
    InvalidExponent(f64),
    #[error("time series mismatch: {0}")]
    SeriesMismatch(String),
    #[error("invalid time series: {0}")]
    InvalidSeries(String),
    #[error("paraproduct reconstruction residual {0:e} exceeds 1e-8 (aliasing or configuration fault)")]
    Reconstruction(f64),
    #[error("time step {dt:e} violates the CFL bound {bound:e}")]
    Cfl { dt: f64, bound: f64 },
    #[error("invalid solver configuration: {0}")]
    InvalidConfig(String),
}

pub type Result<T> = std::result::Result<T, Error>;
