use std::collections::{HashSet, VecDeque};
use std::sync::Arc;

use nalgebra::DMatrix;

use super::hamiltonian::ModelHamiltonian;
use crate::linalg::ZERO;
use crate::statespace::{BasisState, HilbertSpace, OperatorMatrix, StateVector};
use crate::{Error, Result};

pub const DEFAULT_CLOSURE_TOL: f64 = 1e-14;
pub const DEFAULT_CLOSURE_CAP: usize = 512;

/// A restricted space together with its injection into the parent space.
#[derive(Clone, Debug)]
pub struct Restriction {
    pub space: Arc<HilbertSpace>,
    /// `embedding[i]` is the parent index of restricted basis state `i`.
    pub embedding: Vec<usize>,
}

impl Restriction {
    fn from_states(parent: &Arc<HilbertSpace>, states: Vec<BasisState>) -> Result<Self> {
        let embedding = states
            .iter()
            .map(|s| parent.index_of(s).ok_or_else(|| Error::NotInSpace(parent.label(s))))
            .collect::<Result<Vec<_>>>()?;
        let space = HilbertSpace::restricted(parent.subsystems().to_vec(), states)?;
        Ok(Restriction { space, embedding })
    }
}

/// Seeds are visited in order; each one starts a breadth-first search that
/// appends every unseen state it reaches.
fn closure<F>(seeds: Vec<BasisState>, cap: usize, mut neighbors: F) -> Result<Vec<BasisState>>
where
    F: FnMut(&BasisState) -> Result<Vec<BasisState>>,
{
    let mut order: Vec<BasisState> = Vec::new();
    let mut seen: HashSet<BasisState> = HashSet::new();
    for seed in seeds {
        if !seen.insert(seed.clone()) {
            continue;
        }
        order.push(seed.clone());
        let mut queue = VecDeque::from([seed]);
        while let Some(current) = queue.pop_front() {
            for next in neighbors(&current)? {
                if seen.insert(next.clone()) {
                    if order.len() == cap {
                        return Err(Error::CapExceeded(cap));
                    }
                    order.push(next.clone());
                    queue.push_back(next);
                }
            }
        }
    }
    if order.len() > cap {
        return Err(Error::CapExceeded(cap));
    }
    Ok(order)
}

fn seed_support(seed: &StateVector) -> Result<Vec<BasisState>> {
    let support: Vec<BasisState> = seed
        .amplitudes()
        .iter()
        .enumerate()
        .filter(|(_, z)| **z != ZERO)
        .map(|(i, _)| seed.space().state(i).clone())
        .collect();
    if support.is_empty() {
        return Err(Error::InvalidParameter("closure seed is the zero vector".into()));
    }
    Ok(support)
}

/// Basis states connected to the seed's support through matrix elements of
/// `h` larger than `tol`, in breadth-first order.
pub fn reachable_subspace(h: &OperatorMatrix, seed: &StateVector, tol: f64, cap: usize) -> Result<Restriction> {
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter(format!("closure tolerance {tol} must be positive")));
    }
    if !h.space().same_as(seed.space()) {
        return Err(Error::Dimension(format!("operator on {} but seed on {}", h.space(), seed.space())));
    }
    let space = h.space().clone();
    let m = h.entries();
    let states = closure(seed_support(seed)?, cap, |state| {
        let j = space.index_of(state).expect("closure stays inside the operator's space");
        Ok((0..m.nrows())
            .filter(|&i| i != j && (m[(i, j)].norm() > tol || m[(j, i)].norm() > tol))
            .map(|i| space.state(i).clone())
            .collect())
    })?;
    Restriction::from_states(&space, states)
}

/// Same closure as [`reachable_subspace`], driven by the operator terms of
/// the model instead of a dense matrix. Never materializes the parent matrix.
pub fn reachable_from_model(
    model: &ModelHamiltonian,
    seed: &StateVector,
    tol: f64,
    cap: usize,
) -> Result<Restriction> {
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter(format!("closure tolerance {tol} must be positive")));
    }
    let space = seed.space().clone();
    let states = closure(seed_support(seed)?, cap, |state| {
        Ok(model
            .neighbors(&space, state)?
            .into_iter()
            .filter(|(s, c)| c.abs() > tol && s != state)
            .map(|(s, _)| s)
            .collect())
    })?;
    Restriction::from_states(&space, states)
}

/// Compression `P H P` of `h` onto the basis of `sub`.
pub fn restrict(h: &OperatorMatrix, sub: &Arc<HilbertSpace>) -> Result<OperatorMatrix> {
    if h.space().subsystems() != sub.subsystems() {
        return Err(Error::Dimension(format!("{} does not embed into {}", sub, h.space())));
    }
    let index = sub
        .basis()
        .iter()
        .map(|s| h.space().index_of(s).ok_or_else(|| Error::NotInSpace(sub.label(s))))
        .collect::<Result<Vec<_>>>()?;
    let m = h.entries();
    let n = index.len();
    OperatorMatrix::new(sub.clone(), DMatrix::from_fn(n, n, |i, j| m[(index[i], index[j])]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{build_hamiltonian, chain_levels, model_space, model_state, Side, UniformParams};

    #[test]
    fn cap_is_enforced() {
        let space = model_space(1).unwrap();
        let p = UniformParams::new(1.0, 1.0, 0.1, 0.1, 0.1);
        let model = ModelHamiltonian::new(&p.to_system()).unwrap();
        let (a, b, c, _) = chain_levels(Side::Left, 0);
        let seed = StateVector::from_basis_state(space.clone(), &model_state(&space, a, b, c, &[]).unwrap()).unwrap();
        assert!(matches!(reachable_from_model(&model, &seed, DEFAULT_CLOSURE_TOL, 5), Err(Error::CapExceeded(5))));
        assert_eq!(reachable_from_model(&model, &seed, DEFAULT_CLOSURE_TOL, 7).unwrap().space.dim(), 7);
    }

    #[test]
    fn restrict_rejects_foreign_states() {
        let p = UniformParams::new(1.0, 1.0, 0.1, 0.1, 0.1);
        let small = crate::model::BranchSystem::new(p, crate::model::Branch::Left).unwrap();
        let other = crate::model::BranchSystem::new(p, crate::model::Branch::Right).unwrap();
        let h = build_hamiltonian(&p.to_system(), small.space()).unwrap().total;
        assert!(restrict(&h, other.space()).is_err());
    }

    #[test]
    fn zero_drive_splits_the_chain() {
        let p = UniformParams::new(1.0, 0.5, 0.0, 0.0, 0.0);
        let sys = crate::model::BranchSystem::new(UniformParams { omega1: 0.2, omega2: 0.3, ..p }, crate::model::Branch::Left).unwrap();
        let h = build_hamiltonian(&p.to_system(), sys.space()).unwrap().total;
        let m = h.entries();
        // phi_0 and phi_6 decouple; phi_1..phi_5 form the chain g, lambda, lambda, g
        for k in 0..7 {
            assert_eq!(m[(0, k)], ZERO);
            assert_eq!(m[(6, k)], ZERO);
        }
        let chain = [1.0, 0.5, 0.5, 1.0];
        for (i, w) in chain.iter().enumerate() {
            assert_eq!(m[(i + 1, i + 2)].re, *w);
        }
    }
}
