//! The atom-cavity-fiber Hamiltonian and its single-excitation subspaces.
//!
//! The interaction-picture Hamiltonian is the sum of three parts: atom-cavity
//! exchange, cavity-fiber exchange and the classical drives on the `f <-> e`
//! transitions. All transitions are resonant and all rates are real, so every
//! matrix produced here is real symmetric.
//!
//! Counting `e`, `f` and each photon as one excitation, the Hamiltonian
//! conserves the total excitation number. Starting from a single excitation
//! on atom `a`, only seven product states per polarization are reachable;
//! [`reachable_subspace`] finds them by breadth-first closure and
//! [`restrict`] compresses operators onto them.

mod branch;
mod closure;
pub mod golden;
mod hamiltonian;
mod params;

pub use branch::{chain_levels, model_space, model_state, Branch, BranchSystem, Side, CHAIN_LEN};
pub use closure::{
    reachable_from_model, reachable_subspace, restrict, Restriction, DEFAULT_CLOSURE_CAP, DEFAULT_CLOSURE_TOL,
};
pub use hamiltonian::{build_hamiltonian, excitation_number, HamiltonianParts, ModelHamiltonian, Part};
pub use params::{FiberRegime, SystemParams, UniformParams};
