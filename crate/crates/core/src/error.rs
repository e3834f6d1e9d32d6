use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("argument out of range: {0}")]
    Range(String),

    #[error("invalid input: {0}")]
    Input(String),

    #[error("internal error: {0}")]
    Internal(String),

    #[error("series truncation failed: {0}")]
    Truncation(String),

    #[error("log-derivative hit a pole near r = {r:e} in channel n = {n}")]
    Stiffness { n: i64, r: f64 },

    #[error("radial integration did not converge: {0}")]
    Tolerance(String),

    #[error("degenerate matching denominator in channel n = {n}")]
    DegenerateMatch { n: i64 },

    #[error("quadrature not converged: {0}")]
    Quadrature(String),

    #[error("ambiguous kappa: minima at {first} and {second} are indistinguishable")]
    Ambiguity { first: f64, second: f64 },

    #[error("power-law fit failed: {0}")]
    Fit(String),
}
