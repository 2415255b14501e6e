use std::sync::Arc;

use nalgebra::DMatrix;

use super::params::SystemParams;
use crate::linalg::{C64, ZERO};
use crate::statespace::{Atom, BasisState, HilbertSpace, Level, ModeLabel, OperatorMatrix, SubsystemSpec};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Part {
    AtomCavity,
    CavityFiber,
    Drive,
}

impl Part {
    pub const ALL: [Part; 3] = [Part::AtomCavity, Part::CavityFiber, Part::Drive];
    pub const STRONG: [Part; 2] = [Part::AtomCavity, Part::CavityFiber];
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Target {
    Atom(Atom),
    Mode(ModeLabel),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum LocalOp {
    /// `|to><from|`
    Transition { to: Level, from: Level },
    Lower,
    Raise,
}

impl LocalOp {
    fn adjoint(self) -> Self {
        match self {
            LocalOp::Transition { to, from } => LocalOp::Transition { to: from, from: to },
            LocalOp::Lower => LocalOp::Raise,
            LocalOp::Raise => LocalOp::Lower,
        }
    }
}

/// One non-Hermitian half of a coupling; the Hamiltonian is `sum T + T^H`.
#[derive(Clone, Debug)]
struct Term {
    part: Part,
    coefficient: f64,
    factors: Vec<(Target, LocalOp)>,
}

impl Term {
    fn adjoint(&self) -> Term {
        Term {
            part: self.part,
            coefficient: self.coefficient,
            factors: self.factors.iter().map(|&(t, op)| (t, op.adjoint())).collect(),
        }
    }
}

/// Subsystem positions of the nine model degrees of freedom inside a space.
struct Layout {
    atoms: [usize; 3],
    modes: [usize; 6],
    cutoffs: [u8; 6],
}

impl Layout {
    fn of(space: &HilbertSpace) -> Result<Self> {
        let mut atoms = [0usize; 3];
        for (slot, atom) in [Atom::A, Atom::B, Atom::C].into_iter().enumerate() {
            atoms[slot] = space
                .atom_position(atom)
                .ok_or_else(|| Error::MissingSubsystem(SubsystemSpec::Atom(atom).name()))?;
        }
        let mut modes = [0usize; 6];
        let mut cutoffs = [0u8; 6];
        for (slot, label) in ModeLabel::ALL.into_iter().enumerate() {
            let pos = space
                .mode_position(label)
                .ok_or_else(|| Error::MissingSubsystem(format!("mode {}", label.symbol())))?;
            modes[slot] = pos;
            if let SubsystemSpec::Mode { cutoff, .. } = space.subsystems()[pos] {
                cutoffs[slot] = cutoff;
            }
        }
        Ok(Layout { atoms, modes, cutoffs })
    }

    fn atom_slot(atom: Atom) -> usize {
        match atom {
            Atom::A => 0,
            Atom::B => 1,
            Atom::C => 2,
        }
    }

    fn mode_slot(label: ModeLabel) -> usize {
        ModeLabel::ALL.iter().position(|&l| l == label).unwrap()
    }

    /// `term |state>`, or `None` when it vanishes or leaves the Fock truncation.
    fn apply(&self, term: &Term, state: &BasisState) -> Option<(BasisState, f64)> {
        let mut out = state.clone();
        let mut coefficient = term.coefficient;
        for &(target, op) in &term.factors {
            match (target, op) {
                (Target::Atom(atom), LocalOp::Transition { to, from }) => {
                    let pos = self.atoms[Self::atom_slot(atom)];
                    let level = atom.levels()[out.get(pos) as usize];
                    if level != from {
                        return None;
                    }
                    out.set(pos, atom.local_index(to)?);
                }
                (Target::Mode(label), LocalOp::Lower) => {
                    let pos = self.modes[Self::mode_slot(label)];
                    let n = out.get(pos);
                    if n == 0 {
                        return None;
                    }
                    coefficient *= (n as f64).sqrt();
                    out.set(pos, n - 1);
                }
                (Target::Mode(label), LocalOp::Raise) => {
                    let slot = Self::mode_slot(label);
                    let pos = self.modes[slot];
                    let n = out.get(pos);
                    if n >= self.cutoffs[slot] {
                        return None;
                    }
                    coefficient *= (n as f64 + 1.0).sqrt();
                    out.set(pos, n + 1);
                }
                _ => unreachable!("operator kind does not match subsystem kind"),
            }
        }
        Some((out, coefficient))
    }
}

/// The model Hamiltonian as a list of operator terms, independent of any basis.
#[derive(Clone, Debug)]
pub struct ModelHamiltonian {
    terms: Vec<Term>,
}

impl ModelHamiltonian {
    pub fn new(params: &SystemParams) -> Result<Self> {
        params.validate()?;
        use LocalOp::*;
        use Target::*;
        let atom_cavity = |atom, e, g, mode, rate| Term {
            part: Part::AtomCavity,
            coefficient: rate,
            factors: vec![(Atom(atom), Transition { to: e, from: g }), (Mode(mode), Lower)],
        };
        let cavity_fiber = |fiber, cavity, rate| Term {
            part: Part::CavityFiber,
            coefficient: rate,
            factors: vec![(Mode(fiber), Raise), (Mode(cavity), Lower)],
        };
        let drive = |atom, e, f, rate| Term {
            part: Part::Drive,
            coefficient: rate,
            factors: vec![(Atom(atom), Transition { to: e, from: f })],
        };
        let p = params;
        let terms = vec![
            atom_cavity(crate::statespace::Atom::A, Level::El, Level::Gl, ModeLabel::Al, p.g_al),
            atom_cavity(crate::statespace::Atom::A, Level::Er, Level::Gr, ModeLabel::Ar, p.g_ar),
            atom_cavity(crate::statespace::Atom::B, Level::El, Level::Gl, ModeLabel::Bl, p.g_bl),
            atom_cavity(crate::statespace::Atom::C, Level::Er, Level::Gr, ModeLabel::Br, p.g_cr),
            cavity_fiber(ModeLabel::Fl, ModeLabel::Al, p.lambda_l),
            cavity_fiber(ModeLabel::Fl, ModeLabel::Bl, p.lambda_l),
            cavity_fiber(ModeLabel::Fr, ModeLabel::Ar, p.lambda_r),
            cavity_fiber(ModeLabel::Fr, ModeLabel::Br, p.lambda_r),
            drive(crate::statespace::Atom::A, Level::El, Level::Fl, p.omega_al),
            drive(crate::statespace::Atom::A, Level::Er, Level::Fr, p.omega_ar),
            drive(crate::statespace::Atom::B, Level::El, Level::Fl, p.omega_bl),
            drive(crate::statespace::Atom::C, Level::Er, Level::Fr, p.omega_cr),
        ]
        .into_iter()
        .filter(|t| t.coefficient != 0.0)
        .collect();
        Ok(ModelHamiltonian { terms })
    }

    /// Dense matrix of the selected parts on `space`.
    ///
    /// On a restricted space this is the compression `P H P`: couplings that
    /// leave the space are dropped.
    pub fn matrix(&self, parts: &[Part], space: &Arc<HilbertSpace>) -> Result<OperatorMatrix> {
        let layout = Layout::of(space)?;
        let n = space.dim();
        let mut m = DMatrix::from_element(n, n, ZERO);
        for (j, state) in space.basis().iter().enumerate() {
            for term in self.terms.iter().filter(|t| parts.contains(&t.part)) {
                if let Some((image, c)) = layout.apply(term, state) {
                    if let Some(k) = space.index_of(&image) {
                        m[(k, j)] += C64::new(c, 0.0);
                        m[(j, k)] += C64::new(c, 0.0);
                    }
                }
            }
        }
        OperatorMatrix::hermitian(space.clone(), m)
    }

    /// States coupled to `state` by any term, with the coupling amplitude.
    /// Order: model term order, each term before its adjoint.
    pub fn neighbors(&self, space: &HilbertSpace, state: &BasisState) -> Result<Vec<(BasisState, f64)>> {
        let layout = Layout::of(space)?;
        let mut out = Vec::new();
        for term in &self.terms {
            for t in [term.clone(), term.adjoint()] {
                if let Some(hit) = layout.apply(&t, state) {
                    out.push(hit);
                }
            }
        }
        Ok(out)
    }
}

/// `H_ac`, `H_cf`, `H_d`, their strong sum `H_ac + H_cf`, and the total.
#[derive(Clone, Debug)]
pub struct HamiltonianParts {
    pub atom_cavity: OperatorMatrix,
    pub cavity_fiber: OperatorMatrix,
    pub drive: OperatorMatrix,
    pub strong: OperatorMatrix,
    pub total: OperatorMatrix,
}

pub fn build_hamiltonian(params: &SystemParams, space: &Arc<HilbertSpace>) -> Result<HamiltonianParts> {
    let model = ModelHamiltonian::new(params)?;
    let atom_cavity = model.matrix(&[Part::AtomCavity], space)?;
    let cavity_fiber = model.matrix(&[Part::CavityFiber], space)?;
    let drive = model.matrix(&[Part::Drive], space)?;
    let strong = atom_cavity.add(&cavity_fiber)?;
    let total = strong.add(&drive)?;
    Ok(HamiltonianParts { atom_cavity, cavity_fiber, drive, strong, total })
}

/// Total excitation number: one per photon and per atom in an `e` or `f` level.
pub fn excitation_number(space: &Arc<HilbertSpace>) -> Result<OperatorMatrix> {
    let n = space.dim();
    let mut m = DMatrix::from_element(n, n, ZERO);
    for (i, state) in space.basis().iter().enumerate() {
        let mut count = 0u32;
        for (local, spec) in state.locals().iter().zip(space.subsystems()) {
            count += match spec {
                SubsystemSpec::Atom(atom) => atom.levels()[*local as usize].excitation(),
                SubsystemSpec::Mode { .. } => *local as u32,
            };
        }
        m[(i, i)] = C64::new(count as f64, 0.0);
    }
    OperatorMatrix::hermitian(space.clone(), m)
}
