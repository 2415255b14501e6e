#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use zenofiber::model::{BranchSystem, Side, UniformParams, CHAIN_LEN};
use zenofiber::statespace::StateVector;
use zenofiber::C64;

pub fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

/// Log-uniform draw from `[lo, hi]`.
pub fn log_uniform(rng: &mut StdRng, lo: f64, hi: f64) -> f64 {
    (rng.gen_range(lo.ln()..hi.ln())).exp()
}

/// Tridiagonal 7x7 chain with couplings (first, g, lambda, lambda, g, last).
pub fn chain(first: f64, g: f64, lambda: f64, last: f64) -> DMatrix<C64> {
    let off = [first, g, lambda, lambda, g, last];
    let mut m = DMatrix::zeros(CHAIN_LEN, CHAIN_LEN);
    for (i, &x) in off.iter().enumerate() {
        m[(i, i + 1)] = c(x);
        m[(i + 1, i)] = c(x);
    }
    m
}

/// Matrix elements `<phi_i| H |phi_j>` over the chain kets of one side.
pub fn in_chain_basis(sys: &BranchSystem, side: Side, h: &zenofiber::statespace::OperatorMatrix) -> DMatrix<C64> {
    let kets: Vec<StateVector> = (0..CHAIN_LEN).map(|i| sys.chain_ket(side, i).unwrap()).collect();
    DMatrix::from_fn(CHAIN_LEN, CHAIN_LEN, |i, j| h.element(&kets[i], &kets[j]).unwrap())
}

pub fn max_diff(a: &DMatrix<C64>, b: &DMatrix<C64>) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// Eigenvector of the bright block (phi1..phi5, couplings g, lambda, lambda, g)
/// at eigenvalue `e`, by forward recurrence, embedded in the 7-chain.
pub fn bright_vector(p: &UniformParams, e: f64) -> DVector<C64> {
    let (g, l) = (p.g, p.lambda);
    let v1 = 1.0;
    let v2 = e * v1 / g;
    let v3 = (e * v2 - g * v1) / l;
    let v4 = (e * v3 - l * v2) / l;
    let v5 = (e * v4 - l * v3) / g;
    let v = DVector::from_vec(vec![0.0, v1, v2, v3, v4, v5, 0.0]);
    let v = &v / v.norm();
    v.map(c)
}

/// Chain-basis amplitudes of a state on one side.
pub fn chain_amplitudes(sys: &BranchSystem, side: Side, psi: &StateVector) -> DVector<C64> {
    DVector::from_fn(CHAIN_LEN, |i, _| sys.chain_ket(side, i).unwrap().inner(psi).unwrap())
}

/// Random parameters with all rates in `[lo, hi]` (log-uniform).
pub fn random_params(rng: &mut StdRng, lo: f64, hi: f64) -> UniformParams {
    UniformParams::new(
        log_uniform(rng, lo, hi),
        log_uniform(rng, lo, hi),
        log_uniform(rng, lo, hi),
        log_uniform(rng, lo, hi),
        log_uniform(rng, lo, hi),
    )
}
