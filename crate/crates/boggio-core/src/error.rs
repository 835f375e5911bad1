use thiserror::Error;

/// Errors shared across the crate.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("gamma pole at non-positive integer x = {0}")]
    Pole(f64),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("hypergeometric series diverges at z = 1 (c - a - b = {0} <= 0)")]
    Divergence(f64),
    #[error("coincident points: kernel is undefined at x = y")]
    CoincidentPoints,
    #[error("inversion is undefined at the origin")]
    Origin,
    #[error("quadrature did not converge: value = {value}, error estimate = {error_estimate}")]
    NonConvergence { value: f64, error_estimate: f64 },
    #[error("series converges too slowly: tail bound {tail_bound} above tolerance {tol} after {terms} terms")]
    SlowConvergence {
        tail_bound: f64,
        tol: f64,
        terms: usize,
    },
    #[error("decomposition fit failed: reconstruction residual {residual} above {tol}")]
    FitFailure { residual: f64, tol: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
