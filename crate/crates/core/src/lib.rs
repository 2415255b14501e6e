//! Quantum Zeno dynamics of a hybrid atom-cavity-fiber system.
//!
//! A six-level atom `a` sits in cavity `A`; three-level atoms `b` and `c`
//! sit in cavity `B`; the two cavities are joined by a fiber carrying one
//! mode per polarization. The crate builds the single-excitation dynamics of
//! that network, extracts its dark/bright spectral structure, propagates
//! states exactly and under the dark-space effective Hamiltonian, and runs
//! the entangling protocols built on top of it (state transfer, Bell and
//! three-term states, swap, GHZ and six-term states).
//!
//! Module layout:
//!
//! - [`statespace`]: tensor-product Hilbert spaces, state vectors, operators,
//!   density matrices, partial trace, fidelity and negativity.
//! - [`model`]: the physical Hamiltonian and its reachable subspaces.
//! - [`zeno`]: eigenprojector clustering, Zeno Hamiltonians and the closed-form
//!   dark states.
//! - [`dynamics`]: spectral propagation, closed-form dark-space amplitudes and
//!   protocol timing.
//! - [`protocols`]: end-to-end scenarios with fidelity scoring.

pub mod dynamics;
mod error;
pub mod linalg;
pub mod model;
pub mod protocols;
pub mod statespace;
pub mod zeno;

pub use error::{Error, Result};
pub use linalg::C64;
