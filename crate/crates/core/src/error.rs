//! Error types shared across the crate.

use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Unified error type for all simulation operations.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    /// A state would exceed the configured total-photon truncation.
    #[error("photon number {photons} exceeds truncation {n_max}")]
    Truncation { photons: u32, n_max: u32 },

    /// A matrix expected to be unitary is not, within tolerance.
    #[error("matrix is not unitary (deviation {deviation})")]
    NonUnitary { deviation: f64 },

    /// A mode label was not found where it is required.
    #[error("unknown mode: {0}")]
    UnknownMode(String),

    /// A parameter is outside its documented domain.
    #[error("parameter out of range: {0}")]
    Param(String),

    /// A heralded operation has zero success probability, so the
    /// conditional output state is undefined.
    #[error("heralded success probability is zero; output state undefined")]
    ZeroSuccess,

    /// A coincidence policy was requested outside its validity domain.
    #[error("policy not applicable: {0}")]
    Policy(String),

    /// A numerical routine failed to converge or produced an invalid value.
    #[error("numerical failure: {0}")]
    Numeric(String),
}
