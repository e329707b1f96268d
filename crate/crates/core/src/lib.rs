//! Thermal averages of small quantum systems from a two-stage statevector
//! pipeline: variational preparation of a partially mixed state over a
//! system+auxiliary register, then spectrum measurement and reweighting to
//! evaluate Gibbs expectation values over a whole temperature grid from a
//! single prepared state.
//!
//! Module map:
//! - [`qsim`]: dense statevector simulator (gates, circuits, sampling).
//! - [`pauli`]: Pauli-sum observables, the transverse-field Ising model,
//!   measurement decomposition, and the exact diagonalization oracle.
//! - [`ansatz`]: mixing-register preparation, controlled initializer, and
//!   the layered variational circuit.
//! - [`vqe`]: weighted cost functional, parameter-shift gradients, and the
//!   minimization loop.
//! - [`reweight`]: spectrum-vector estimation and ratio-of-expectations
//!   thermal averages over a β grid.
//! - [`checks`]: runnable property suite mirroring the library's invariants.

pub mod ansatz;
pub mod checks;
pub mod error;
pub mod pauli;
pub mod qsim;
pub mod reweight;
pub mod vqe;

pub use error::{Error, Result};
