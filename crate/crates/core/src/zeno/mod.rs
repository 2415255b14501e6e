//! Zeno decomposition of a strong Hamiltonian and the dark/bright structure
//! of the atom-cavity-fiber chain.
//!
//! For `H_K = H_S + K H_C` with `H_C = sum_n E_n P_n`, the Zeno Hamiltonian
//! is `H_Z = sum_n P_n H_S P_n` and the limiting generator
//! `sum_n (K E_n P_n + P_n H_S P_n)`. Here `H_C` is the atom-cavity plus
//! cavity-fiber exchange and `H_S` the drives. The zero-eigenvalue cluster of
//! `H_C` is spanned by three dark states per polarization sector; the drives
//! couple them with strengths `lambda Omega / (g chi)`.

mod dark;
mod decomposition;

pub use dark::{
    analytic_dark_bright, analytic_effective_matrix, compare_formula_bright, max_principal_angle, formula_bright,
    BrightLabel, BrightState, DarkBrightBasis, Parity, FormulaBrightCheck,
};
pub use decomposition::{
    decompose, default_cluster_width, limiting_generator, zeno_hamiltonian, Cluster, ZenoDecomposition,
};
