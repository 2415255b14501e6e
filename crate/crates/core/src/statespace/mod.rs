//! Tensor-product Hilbert spaces and the quantum-information primitives used
//! throughout the crate.
//!
//! Every vector, operator and density matrix carries an `Arc<HilbertSpace>`.
//! A space is either the full tensor product of its subsystems (basis in
//! lexicographic order of local indices, first subsystem most significant) or
//! a restricted space listing a subset of product states in a caller-chosen
//! order. Restricted spaces keep the subsystem list, so partial traces and
//! single-mode gates work on them directly.

mod density;
mod gates;
mod space;
mod vector;

pub use density::{fidelity, negativity, partial_trace, DensityMatrix, NEGATIVITY_MAX_DIM};
pub use gates::{apply_mode_gate, hadamard, outcome_probabilities, project_mode, Gate};
pub use space::{build_space, Atom, BasisState, HilbertSpace, Level, ModeLabel, SubsystemSpec};
pub use vector::{inner, OperatorMatrix, StateVector};

/// Entrywise tolerance for structural checks (Hermiticity, unitarity, norms).
pub const STRUCTURAL_TOL: f64 = 1e-12;
/// Tolerance for spectral checks (eigen-residuals, reconstructions).
pub const SPECTRAL_TOL: f64 = 1e-9;
