//! Sparse statevector engine for permutation-dominated circuits.
//!
//! States are maps from [`BasisLabel`] to amplitude. Permutation gates only
//! relabel entries; the one non-permutation gate, a multi-controlled
//! rotation, splits each active entry into at most two. A dense path for up
//! to [`DENSE_CAP`] qubits exists for cross-checking and unitarity tests.

mod dense;
mod gate;
mod label;
mod state;

pub use dense::{
    apply_circuit_dense, apply_gate_dense, basis_vector, circuit_to_operator, to_dense, unitarity_check, DenseOperator,
    UnitarityReport, DENSE_CAP, OPERATOR_CAP,
};
pub use gate::{Circuit, Gate, ROTATION_NORM_TOL};
pub use label::BasisLabel;
pub use state::{CircuitEffect, GateEffect, SparseState, PRUNE_THRESHOLD};
