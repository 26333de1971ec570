use thiserror::Error;

/// Everything that can go wrong in the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("resonance obstruction at exponent {exponent}")]
    Resonance { exponent: String },
    #[error("gamma pole at {0}")]
    Pole(i64),
    #[error("divergent direction: insertion exponent {exponent} beats the gamma decay")]
    Divergent { exponent: i64 },
    #[error("class {0} is not effective (no sections)")]
    NotEffective(String),
    #[error("empty phase: no coordinate has the sign of zeta")]
    EmptyPhase,
    #[error("no decomposition found, remainder {remainder}")]
    NoDecomposition { remainder: String },
    #[error("internal consistency check failed: {0}")]
    Consistency(String),
    #[error("residue sum outside its convergence regime: {0}")]
    Convergence(String),
}

pub type Result<T> = std::result::Result<T, Error>;
