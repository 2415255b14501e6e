use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::closure::{reachable_from_model, Restriction, DEFAULT_CLOSURE_CAP, DEFAULT_CLOSURE_TOL};
use super::hamiltonian::{build_hamiltonian, HamiltonianParts, ModelHamiltonian};
use super::params::{SystemParams, UniformParams};
use crate::linalg::C64;
use crate::statespace::{build_space, Atom, BasisState, HilbertSpace, Level, ModeLabel, StateVector, SubsystemSpec};
use crate::{Error, Result};

pub const CHAIN_LEN: usize = 7;

/// Polarization sector of the single-excitation dynamics.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
}

/// Which initial state the system starts from: atom `a` in `f_l`, in `f_r`,
/// or in their equal superposition.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    Left,
    Right,
    Combined,
}

impl Branch {
    pub fn sides(self) -> &'static [Side] {
        match self {
            Branch::Left => &[Side::Left],
            Branch::Right => &[Side::Right],
            Branch::Combined => &[Side::Left, Side::Right],
        }
    }
}

/// Subsystems in canonical order: atoms a, b, c, then modes A_l, A_r, B_l, B_r, F_l, F_r.
pub fn model_space(cutoff: u8) -> Result<Arc<HilbertSpace>> {
    let mut specs = vec![SubsystemSpec::Atom(Atom::A), SubsystemSpec::Atom(Atom::B), SubsystemSpec::Atom(Atom::C)];
    specs.extend(ModeLabel::ALL.iter().map(|&l| SubsystemSpec::mode(l, cutoff)));
    build_space(&specs)
}

/// Product state with the given atomic levels and photon numbers, all other modes empty.
pub fn model_state(space: &HilbertSpace, a: Level, b: Level, c: Level, photons: &[(ModeLabel, u8)]) -> Result<BasisState> {
    let mut locals = vec![0u8; space.subsystems().len()];
    for (atom, level) in [(Atom::A, a), (Atom::B, b), (Atom::C, c)] {
        let pos = space
            .atom_position(atom)
            .ok_or_else(|| Error::MissingSubsystem(SubsystemSpec::Atom(atom).name()))?;
        locals[pos] = atom
            .local_index(level)
            .ok_or_else(|| Error::InvalidParameter(format!("atom {atom:?} has no level {}", level.symbol())))?;
    }
    for &(label, n) in photons {
        let pos = space
            .mode_position(label)
            .ok_or_else(|| Error::MissingSubsystem(format!("mode {}", label.symbol())))?;
        if n as usize >= space.subsystems()[pos].dim() {
            return Err(Error::InvalidParameter(format!("{n} photons above cutoff of {}", label.symbol())));
        }
        locals[pos] = n;
    }
    Ok(BasisState::new(locals))
}

/// Levels of atoms (a, b, c) and the occupied mode of chain state `i`.
///
/// Left: `f_l g_l g_r`, `e_l g_l g_r`, photon in `A_l`, in `F_l`, in `B_l`,
/// `g_l e_l g_r`, `g_l f_l g_r`. Right mirrors it through `A_r`, `F_r`, `B_r`
/// and atom `c`.
pub fn chain_levels(side: Side, i: usize) -> (Level, Level, Level, Option<ModeLabel>) {
    use Level::*;
    match side {
        Side::Left => match i {
            0 => (Fl, Gl, Gr, None),
            1 => (El, Gl, Gr, None),
            2 => (Gl, Gl, Gr, Some(ModeLabel::Al)),
            3 => (Gl, Gl, Gr, Some(ModeLabel::Fl)),
            4 => (Gl, Gl, Gr, Some(ModeLabel::Bl)),
            5 => (Gl, El, Gr, None),
            6 => (Gl, Fl, Gr, None),
            _ => panic!("chain index {i} out of range"),
        },
        Side::Right => match i {
            0 => (Fr, Gl, Gr, None),
            1 => (Er, Gl, Gr, None),
            2 => (Gr, Gl, Gr, Some(ModeLabel::Ar)),
            3 => (Gr, Gl, Gr, Some(ModeLabel::Fr)),
            4 => (Gr, Gl, Gr, Some(ModeLabel::Br)),
            5 => (Gr, Gl, Er, None),
            6 => (Gr, Gl, Fr, None),
            _ => panic!("chain index {i} out of range"),
        },
    }
}

fn chain_state(space: &HilbertSpace, side: Side, i: usize) -> Result<BasisState> {
    let (a, b, c, mode) = chain_levels(side, i);
    let photons: Vec<(ModeLabel, u8)> = mode.into_iter().map(|m| (m, 1)).collect();
    model_state(space, a, b, c, &photons)
}

/// The model restricted to the subspace reachable from a branch's initial state.
#[derive(Clone, Debug)]
pub struct BranchSystem {
    params: UniformParams,
    branch: Branch,
    full: Arc<HilbertSpace>,
    restriction: Restriction,
    parts: HamiltonianParts,
}

impl BranchSystem {
    pub fn new(params: UniformParams, branch: Branch) -> Result<Self> {
        BranchSystem::with_cutoff(params, branch, 1)
    }

    pub fn with_cutoff(params: UniformParams, branch: Branch, cutoff: u8) -> Result<Self> {
        params.validate()?;
        let full = model_space(cutoff)?;
        let seed = BranchSystem::seed(&full, branch)?;
        // The closure runs on the coupling graph with every rate set to one, so
        // the subspace does not shrink when a drive happens to be switched off.
        let structural = SystemParams {
            g_al: 1.0,
            g_ar: 1.0,
            g_bl: 1.0,
            g_cr: 1.0,
            omega_al: 1.0,
            omega_ar: 1.0,
            omega_bl: 1.0,
            omega_cr: 1.0,
            lambda_l: 1.0,
            lambda_r: 1.0,
            fiber: None,
        };
        let model = ModelHamiltonian::new(&structural)?;
        let restriction = reachable_from_model(&model, &seed, DEFAULT_CLOSURE_TOL, DEFAULT_CLOSURE_CAP)?;
        let parts = build_hamiltonian(&params.to_system(), &restriction.space)?;
        Ok(BranchSystem { params, branch, full, restriction, parts })
    }

    /// Initial state of `branch` on `space` (normalized).
    pub fn seed(space: &Arc<HilbertSpace>, branch: Branch) -> Result<StateVector> {
        let w = C64::new(1.0 / (branch.sides().len() as f64).sqrt(), 0.0);
        let terms = branch
            .sides()
            .iter()
            .map(|&side| Ok((chain_state(space, side, 0)?, w)))
            .collect::<Result<Vec<_>>>()?;
        StateVector::from_terms(space.clone(), &terms)
    }

    pub fn params(&self) -> &UniformParams {
        &self.params
    }

    pub fn branch(&self) -> Branch {
        self.branch
    }

    /// The restricted evolution space.
    pub fn space(&self) -> &Arc<HilbertSpace> {
        &self.restriction.space
    }

    pub fn full_space(&self) -> &Arc<HilbertSpace> {
        &self.full
    }

    pub fn embedding(&self) -> &[usize] {
        &self.restriction.embedding
    }

    pub fn parts(&self) -> &HamiltonianParts {
        &self.parts
    }

    pub fn initial_state(&self) -> StateVector {
        BranchSystem::seed(self.space(), self.branch).expect("seed lies in its own closure")
    }

    /// Chain state `i` of `side` as a ket in the restricted space.
    pub fn chain_ket(&self, side: Side, i: usize) -> Result<StateVector> {
        if i >= CHAIN_LEN {
            return Err(Error::InvalidParameter(format!("chain index {i} out of range")));
        }
        let state = chain_state(self.space(), side, i)?;
        StateVector::from_basis_state(self.space().clone(), &state)
    }

    pub fn position(&self, atom: Atom) -> usize {
        self.space().atom_position(atom).expect("model spaces contain every atom")
    }

    pub fn mode(&self, label: ModeLabel) -> usize {
        self.space().mode_position(label).expect("model spaces contain every mode")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn left_closure_follows_chain_order() {
        let sys = BranchSystem::new(UniformParams::new(1.0, 1.0, 0.01, 0.0, 0.0), Branch::Left).unwrap();
        assert_eq!(sys.space().dim(), CHAIN_LEN);
        for i in 0..CHAIN_LEN {
            let ket = sys.chain_ket(Side::Left, i).unwrap();
            assert_eq!(ket.amplitudes()[i], C64::new(1.0, 0.0));
        }
    }

    #[test]
    fn combined_closure_is_left_then_right() {
        let sys = BranchSystem::new(UniformParams::new(1.0, 1.0, 0.01, 0.01, 0.01), Branch::Combined).unwrap();
        assert_eq!(sys.space().dim(), 2 * CHAIN_LEN);
        for i in 0..CHAIN_LEN {
            assert_eq!(sys.chain_ket(Side::Right, i).unwrap().amplitudes()[CHAIN_LEN + i], C64::new(1.0, 0.0));
        }
        assert!((sys.initial_state().norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn right_sector_uses_right_modes() {
        let sys = BranchSystem::new(UniformParams::new(1.0, 1.0, 0.01, 0.0, 0.0), Branch::Right).unwrap();
        let space = sys.space();
        let ar = space.mode_position(ModeLabel::Ar).unwrap();
        assert_eq!(space.state(2).get(ar), 1);
    }
}
