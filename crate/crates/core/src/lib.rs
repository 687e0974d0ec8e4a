//! Entanglement dynamics of driven, lossy qubits under an effective
//! non-Hermitian Hamiltonian with passive PT symmetry.
//!
//! The crate is organised bottom-up:
//!
//! * [`hamiltonian`] builds the `2^n x 2^n` Hamiltonian and classifies the PT
//!   phase of an uncoupled qubit.
//! * [`dynamics`] propagates states with a scaling-and-squaring matrix
//!   exponential, post-selects them, and exposes the biorthogonal spectral
//!   decomposition.
//! * [`entanglement`] computes concurrences, the residual three-tangle and
//!   single-qubit entropies.
//! * [`experiments`] runs scenarios, sweeps and optimum searches.

// NaN must fail every validity check, so bounds are written as `!(x > a)`
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod basis;
pub mod dynamics;
pub mod entanglement;
pub mod error;
pub mod experiments;
pub mod expm;
pub mod hamiltonian;
pub mod output;

pub use num_complex::Complex64 as C64;

pub use error::{Error, Result};

/// Version recorded in run metadata.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
