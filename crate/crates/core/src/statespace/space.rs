use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Atomic level; `f` and `e` are the driven pair, `g` the cavity-coupled ground level.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Level {
    Fl,
    El,
    Gl,
    Fr,
    Er,
    Gr,
}

impl Level {
    /// Excitation count of the level: `e` and `f` count one, `g` zero.
    pub fn excitation(self) -> u32 {
        match self {
            Level::Gl | Level::Gr => 0,
            _ => 1,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Level::Fl => "f_l",
            Level::El => "e_l",
            Level::Gl => "g_l",
            Level::Fr => "f_r",
            Level::Er => "e_r",
            Level::Gr => "g_r",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Atom {
    A,
    B,
    C,
}

const ATOM_A_LEVELS: [Level; 6] = [Level::Fl, Level::El, Level::Gl, Level::Fr, Level::Er, Level::Gr];
const ATOM_B_LEVELS: [Level; 3] = [Level::Fl, Level::El, Level::Gl];
const ATOM_C_LEVELS: [Level; 3] = [Level::Fr, Level::Er, Level::Gr];

impl Atom {
    /// Level list in local-index order.
    pub fn levels(self) -> &'static [Level] {
        match self {
            Atom::A => &ATOM_A_LEVELS,
            Atom::B => &ATOM_B_LEVELS,
            Atom::C => &ATOM_C_LEVELS,
        }
    }

    pub fn local_index(self, level: Level) -> Option<u8> {
        self.levels().iter().position(|&l| l == level).map(|i| i as u8)
    }
}

/// Bosonic modes: cavity `A`, cavity `B` and the fiber `F`, one per polarization.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ModeLabel {
    Al,
    Ar,
    Bl,
    Br,
    Fl,
    Fr,
}

impl ModeLabel {
    pub const ALL: [ModeLabel; 6] = [ModeLabel::Al, ModeLabel::Ar, ModeLabel::Bl, ModeLabel::Br, ModeLabel::Fl, ModeLabel::Fr];

    pub fn symbol(self) -> &'static str {
        match self {
            ModeLabel::Al => "A_l",
            ModeLabel::Ar => "A_r",
            ModeLabel::Bl => "B_l",
            ModeLabel::Br => "B_r",
            ModeLabel::Fl => "F_l",
            ModeLabel::Fr => "F_r",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SubsystemSpec {
    Atom(Atom),
    /// Fock space `{0, ..., cutoff}`.
    Mode { label: ModeLabel, cutoff: u8 },
}

impl SubsystemSpec {
    pub fn mode(label: ModeLabel, cutoff: u8) -> Self {
        SubsystemSpec::Mode { label, cutoff }
    }

    pub fn dim(&self) -> usize {
        match self {
            SubsystemSpec::Atom(atom) => atom.levels().len(),
            SubsystemSpec::Mode { cutoff, .. } => *cutoff as usize + 1,
        }
    }

    pub fn name(&self) -> String {
        match self {
            SubsystemSpec::Atom(atom) => format!("atom {}", format!("{atom:?}").to_lowercase()),
            SubsystemSpec::Mode { label, .. } => format!("mode {}", label.symbol()),
        }
    }

    fn local_label(&self, local: u8) -> String {
        match self {
            SubsystemSpec::Atom(atom) => atom.levels()[local as usize].symbol().to_string(),
            SubsystemSpec::Mode { .. } => local.to_string(),
        }
    }

    fn validate(&self) -> Result<()> {
        match self {
            SubsystemSpec::Mode { label, cutoff } if *cutoff < 1 => Err(Error::InvalidSpec(format!(
                "mode {} has Fock cutoff {cutoff}, need at least 1",
                label.symbol()
            ))),
            _ => Ok(()),
        }
    }
}

/// A product configuration: one local index per subsystem.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BasisState(Vec<u8>);

impl BasisState {
    pub fn new(locals: Vec<u8>) -> Self {
        BasisState(locals)
    }

    pub fn locals(&self) -> &[u8] {
        &self.0
    }

    pub fn get(&self, subsystem: usize) -> u8 {
        self.0[subsystem]
    }

    pub fn with(&self, subsystem: usize, local: u8) -> Self {
        let mut v = self.0.clone();
        v[subsystem] = local;
        BasisState(v)
    }

    pub(crate) fn set(&mut self, subsystem: usize, local: u8) {
        self.0[subsystem] = local;
    }
}

#[derive(Debug)]
pub struct HilbertSpace {
    subsystems: Vec<SubsystemSpec>,
    basis: Vec<BasisState>,
    lookup: HashMap<BasisState, usize>,
    full_product: bool,
}

/// Full tensor product of `specs`, basis in lexicographic order.
pub fn build_space(specs: &[SubsystemSpec]) -> Result<Arc<HilbertSpace>> {
    if specs.is_empty() {
        return Err(Error::InvalidSpec("empty subsystem list".into()));
    }
    for s in specs {
        s.validate()?;
    }
    let dims: Vec<usize> = specs.iter().map(|s| s.dim()).collect();
    let total: usize = dims.iter().product();
    let mut basis = Vec::with_capacity(total);
    let mut current = vec![0u8; specs.len()];
    for _ in 0..total {
        basis.push(BasisState(current.clone()));
        // odometer increment, last subsystem fastest
        for pos in (0..specs.len()).rev() {
            current[pos] += 1;
            if (current[pos] as usize) < dims[pos] {
                break;
            }
            current[pos] = 0;
        }
    }
    Ok(Arc::new(HilbertSpace::assemble(specs.to_vec(), basis, true)))
}

impl HilbertSpace {
    fn assemble(subsystems: Vec<SubsystemSpec>, basis: Vec<BasisState>, full_product: bool) -> Self {
        let lookup = basis.iter().enumerate().map(|(i, b)| (b.clone(), i)).collect();
        HilbertSpace { subsystems, basis, lookup, full_product }
    }

    /// A space spanned by the listed product states, in the given order.
    pub fn restricted(subsystems: Vec<SubsystemSpec>, basis: Vec<BasisState>) -> Result<Arc<Self>> {
        if subsystems.is_empty() {
            return Err(Error::InvalidSpec("empty subsystem list".into()));
        }
        for s in &subsystems {
            s.validate()?;
        }
        if basis.is_empty() {
            return Err(Error::InvalidSpec("restricted space needs at least one basis state".into()));
        }
        for b in &basis {
            if b.0.len() != subsystems.len() {
                return Err(Error::InvalidSpec(format!(
                    "basis state has {} entries for {} subsystems",
                    b.0.len(),
                    subsystems.len()
                )));
            }
            for (local, spec) in b.0.iter().zip(&subsystems) {
                if *local as usize >= spec.dim() {
                    return Err(Error::InvalidSpec(format!("local index {local} out of range for {}", spec.name())));
                }
            }
        }
        let product: usize = subsystems.iter().map(|s| s.dim()).product();
        let space = HilbertSpace::assemble(subsystems, basis, false);
        if space.lookup.len() != space.basis.len() {
            return Err(Error::InvalidSpec("restricted basis contains duplicate states".into()));
        }
        let full_product = space.basis.len() == product;
        Ok(Arc::new(HilbertSpace { full_product, ..space }))
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn subsystems(&self) -> &[SubsystemSpec] {
        &self.subsystems
    }

    pub fn basis(&self) -> &[BasisState] {
        &self.basis
    }

    pub fn state(&self, index: usize) -> &BasisState {
        &self.basis[index]
    }

    pub fn index_of(&self, state: &BasisState) -> Option<usize> {
        self.lookup.get(state).copied()
    }

    /// True when every product configuration of the subsystems is present.
    pub fn is_full_product(&self) -> bool {
        self.full_product
    }

    pub fn subsystem_dims(&self) -> Vec<usize> {
        self.subsystems.iter().map(|s| s.dim()).collect()
    }

    pub fn atom_position(&self, atom: Atom) -> Option<usize> {
        self.subsystems.iter().position(|s| *s == SubsystemSpec::Atom(atom))
    }

    pub fn mode_position(&self, label: ModeLabel) -> Option<usize> {
        self.subsystems
            .iter()
            .position(|s| matches!(s, SubsystemSpec::Mode { label: l, .. } if *l == label))
    }

    /// Same subsystems and same ordered basis.
    pub fn same_as(self: &Arc<Self>, other: &Arc<Self>) -> bool {
        Arc::ptr_eq(self, other) || (self.subsystems == other.subsystems && self.basis == other.basis)
    }

    pub fn label(&self, state: &BasisState) -> String {
        let parts: Vec<String> = state
            .0
            .iter()
            .zip(&self.subsystems)
            .map(|(&local, spec)| spec.local_label(local))
            .collect();
        format!("|{}>", parts.join(","))
    }

    pub(crate) fn check_subsystem(&self, index: usize) -> Result<()> {
        if index >= self.subsystems.len() {
            Err(Error::InvalidIndex { index, count: self.subsystems.len() })
        } else {
            Ok(())
        }
    }
}

impl fmt::Display for HilbertSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<String> = self.subsystems.iter().map(|s| s.name()).collect();
        write!(f, "space[{}; dim {}]", names.join(" x "), self.dim())
    }
}
