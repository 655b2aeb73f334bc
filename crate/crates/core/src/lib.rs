//! Open-system simulation of a hybrid circuit made of two NV-ensemble
//! bosonic modes and a flux qubit, coupled through a two-mode resonator
//! that carries coherent or squeezed Schrödinger-cat states.
//!
//! The crate is organised bottom-up:
//!
//! * [`linalg`] and [`space`]: dense complex kernels and tensor-product bookkeeping.
//! * [`operators`]: truncated Fock-space and qubit operators, embeddings,
//!   displacement, two-mode squeezing and parity.
//! * [`states`]: coherent states, cat states and the full initial state.
//! * [`model`]: parameter record, Hamiltonians and collapse operators.
//! * [`dynamics`]: master-equation integration and time series.
//! * [`metrics`]: Wigner functions, concurrence and fidelity.
//! * [`experiment`]: paired coherent/squeezed runs that feed the CLI.

pub mod dynamics;
pub mod error;
pub mod experiment;
pub mod linalg;
pub mod metrics;
pub mod model;
pub mod operators;
pub mod space;
pub mod states;

#[cfg(test)]
pub(crate) mod testutil;

pub use error::{Error, Result};
pub use linalg::{ComplexMatrix, C64};
pub use space::HilbertSpace;
