//! Quantum lattice Boltzmann toolkit.
//!
//! - [`lattice`]: classical DnQm reference model (streaming, collision classes).
//! - [`qstate`]: sparse statevector engine with a dense cross-check path.
//! - [`realizability`]: Gram-matrix test for unitary realizability and the
//!   amplitude / basis-state encoding counterexamples.
//! - [`spacetime`]: space-time encoding layout, collision and streaming circuits.
//! - [`simulator`]: window and full-grid runs against classical oracles.
//! - [`winfile`]: the `.win` occupancy file format.

pub mod error;
pub mod lattice;
pub mod qstate;
pub mod realizability;
pub mod simulator;
pub mod spacetime;
pub mod winfile;

pub use error::{Error, Result};
