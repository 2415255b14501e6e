//! Hand-written single-excitation matrices, kept as fixtures to cross-check
//! the closure-derived ones.

use nalgebra::DMatrix;

use super::params::UniformParams;
use crate::linalg::C64;

/// Seven-site chain with couplings `first, g, lambda, lambda, g, last` on the
/// first superdiagonal.
pub fn chain_matrix(first: f64, g: f64, lambda: f64, last: f64) -> DMatrix<C64> {
    let r = |x: f64| C64::new(x, 0.0);
    let z = r(0.0);
    #[rustfmt::skip]
    let rows = [
        z,         r(first), z,         z,         z,         z,        z,
        r(first),  z,        r(g),      z,         z,         z,        z,
        z,         r(g),     z,         r(lambda), z,         z,        z,
        z,         z,        r(lambda), z,         r(lambda), z,        z,
        z,         z,        z,         r(lambda), z,         r(g),     z,
        z,         z,        z,         z,         r(g),      z,        r(last),
        z,         z,        z,         z,         z,         r(last),  z,
    ];
    DMatrix::from_row_slice(7, 7, &rows)
}

/// Left-polarization sector, basis `phi_0 .. phi_6`.
pub fn h1(p: &UniformParams) -> DMatrix<C64> {
    chain_matrix(p.omega1, p.g, p.lambda, p.omega2)
}

/// Right-polarization sector, basis `phi'_0 .. phi'_6`.
pub fn h1_prime(p: &UniformParams) -> DMatrix<C64> {
    chain_matrix(p.omega1, p.g, p.lambda, p.omega3)
}

/// Strong part of either sector (drives switched off).
pub fn strong_chain(p: &UniformParams) -> DMatrix<C64> {
    chain_matrix(0.0, p.g, p.lambda, 0.0)
}
