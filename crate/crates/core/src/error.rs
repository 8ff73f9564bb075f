use thiserror::Error;

/// Errors surfaced by the numerical core and the drivers built on it.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("s = {s} is outside the integrated range [{start}, {end}]")]
    Range { s: f64, start: f64, end: f64 },

    #[error("singular state: {0}")]
    Singularity(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("integration failed at s = {s}: {reason}")]
    Integration { s: f64, reason: String },

    #[error("no torus in bracket [{lo}, {hi}]: discriminator never changed sign ({lo_shot}; {hi_shot})")]
    NoTorus {
        lo: f64,
        hi: f64,
        lo_shot: String,
        hi_shot: String,
    },

    #[error("no solution: {0}")]
    NoSolution(String),
}

pub type Result<T> = std::result::Result<T, Error>;
