//! Linear-optical qubit amplifier simulation toolkit.
//!
//! The crate is organized around a truncated multimode Fock-state engine
//! ([`fock`]) on top of which optical elements ([`elements`]), the
//! entanglement-assisted amplifier itself ([`amplifier`]), amplification-based
//! entanglement distillation ([`entanglement`]) and a device-independent QKD
//! key-rate analysis ([`diqkd`]) are built.
//!
//! All numerics are generic over the real scalar type through the
//! [`scalar::Scalar`] trait (`f32` or `f64`); the `*64` aliases at the crate
//! root pin the common double-precision instantiations.

pub mod amplifier;
pub mod diqkd;
pub mod elements;
pub mod entanglement;
pub mod error;
pub mod fock;
pub mod linalg;
pub mod optimize;
pub mod scalar;

pub use error::{Error, Result};
pub use scalar::Scalar;

/// Double-precision state vector.
pub type StateVector64 = fock::StateVector<f64>;
/// Double-precision density matrix.
pub type DensityMatrix64 = fock::DensityMatrix<f64>;
/// Double-precision dense complex matrix.
pub type CMatrix64 = linalg::CMatrix<f64>;
/// Double-precision vacuum/qubit input triple.
pub type QubitVacuumInput64 = amplifier::QubitVacuumInput<f64>;
/// Double-precision amplitude-damped state parameters.
pub type AmplitudeDampedState64 = entanglement::AmplitudeDampedState<f64>;
/// Double-precision DI-QKD protocol parameters.
pub type ProtocolParams64 = diqkd::ProtocolParams<f64>;
