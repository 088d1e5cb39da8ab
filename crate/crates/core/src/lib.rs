//! Angular-momentum filtering of nuclear shell-model trial states.
//!
//! The core types are generic over a [`Real`] scalar; the aliases below fix
//! it to `f64`.

pub mod cartan;
pub mod dense;
pub mod error;
pub mod pauli;
pub mod projection;
pub mod resources;
pub mod scalar;
pub mod simulator;
pub mod spmodel;

pub use error::{Error, Result};
pub use scalar::Real;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub type PauliSum = pauli::PauliSum<f64>;
pub type OneBody = pauli::OneBody<f64>;
pub type DeformedBasis = spmodel::DeformedBasis<f64>;
pub type SpeciesDeformation = spmodel::SpeciesDeformation<f64>;
pub type QuantumState = simulator::QuantumState<f64>;
pub type DiagonalObservable = simulator::DiagonalObservable<f64>;
pub type CartanAnsatz = cartan::CartanAnsatz<f64>;
pub type ProjectionSetup = projection::ProjectionSetup<f64>;
pub type ProjectionRecord = projection::ProjectionRecord<QuantumState>;
