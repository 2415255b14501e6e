//! End-to-end protocol runs: timing, evolution, optional Hadamard readout of
//! the fiber modes, and scoring against the target states.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::dynamics::{quadrature_drive, solve_timing, zeno_ratio, EffectiveEvolution, Propagator, Timing};
use crate::linalg::C64;
use crate::model::{Branch, BranchSystem, Side, UniformParams};
use crate::statespace::{
    apply_mode_gate, build_space, hadamard, project_mode, Atom, BasisState, DensityMatrix, HilbertSpace, Level,
    ModeLabel, StateVector, SubsystemSpec,
};
use crate::{Error, Result};

/// `g / lambda` above which the Bell regime `g << lambda` is flagged.
pub const BELL_REGIME_LIMIT: f64 = 0.2;

/// Relative tolerance for the equal-rate conditions of the protocols.
const RATE_MATCH_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProtocolKind {
    StateTransfer,
    ThreeDimEntangle,
    BellState,
    Swap,
    Ghz,
    SixDim,
}

impl ProtocolKind {
    pub const ALL: [ProtocolKind; 6] = [
        ProtocolKind::StateTransfer,
        ProtocolKind::ThreeDimEntangle,
        ProtocolKind::BellState,
        ProtocolKind::Swap,
        ProtocolKind::Ghz,
        ProtocolKind::SixDim,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ProtocolKind::StateTransfer => "state_transfer",
            ProtocolKind::ThreeDimEntangle => "three_dim_entangle",
            ProtocolKind::BellState => "bell_state",
            ProtocolKind::Swap => "swap",
            ProtocolKind::Ghz => "ghz",
            ProtocolKind::SixDim => "six_dim",
        }
    }

    pub fn timing(self, k: u32) -> Timing {
        match self {
            ProtocolKind::Swap | ProtocolKind::Ghz => Timing::Pi(k),
            _ => Timing::HalfPi(k),
        }
    }

    /// Whether the final state passes through the fiber-mode readout.
    pub fn uses_readout(self) -> bool {
        matches!(self, ProtocolKind::ThreeDimEntangle | ProtocolKind::SixDim)
    }
}

impl fmt::Display for ProtocolKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ProtocolKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_lowercase().replace('-', "_");
        ProtocolKind::ALL
            .into_iter()
            .find(|k| k.name() == key)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown protocol {s:?}")))
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Engine {
    /// Dark-space evolution under the compressed drive.
    #[default]
    Effective,
    /// Exact evolution under the full Hamiltonian on the reachable subspace.
    FullRestricted,
}

impl fmt::Display for Engine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Engine::Effective => "effective",
            Engine::FullRestricted => "full_restricted",
        })
    }
}

impl FromStr for Engine {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().replace('-', "_").as_str() {
            "effective" => Ok(Engine::Effective),
            "full_restricted" | "full" => Ok(Engine::FullRestricted),
            _ => Err(Error::InvalidParameter(format!("unknown engine {s:?}"))),
        }
    }
}

/// What happens to the fiber modes after the Hadamard gate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum Interpretation {
    /// Trace the modes out, leaving a mixed state.
    Trace,
    /// Keep only runs where every gated mode reads this Fock outcome.
    PostSelect(u8),
}

impl Default for Interpretation {
    fn default() -> Self {
        Interpretation::PostSelect(0)
    }
}

impl fmt::Display for Interpretation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Interpretation::Trace => f.write_str("trace"),
            Interpretation::PostSelect(n) => write!(f, "post_select_{n}"),
        }
    }
}

impl FromStr for Interpretation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_lowercase().replace('-', "_");
        match key.as_str() {
            "trace" => Ok(Interpretation::Trace),
            "post_select_0" | "postselect0" => Ok(Interpretation::PostSelect(0)),
            "post_select_1" | "postselect1" => Ok(Interpretation::PostSelect(1)),
            _ => Err(Error::InvalidParameter(format!("unknown interpretation {s:?} (trace, post_select_0, post_select_1)"))),
        }
    }
}

impl From<Interpretation> for String {
    fn from(i: Interpretation) -> String {
        i.to_string()
    }
}

impl TryFrom<String> for Interpretation {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProtocolSpec {
    pub kind: ProtocolKind,
    pub branch: Branch,
    pub params: UniformParams,
    pub k: u32,
    pub engine: Engine,
    /// Only consulted by protocols with a fiber readout.
    pub interpretation: Interpretation,
}

impl ProtocolSpec {
    pub fn new(kind: ProtocolKind, branch: Branch, params: UniformParams) -> Self {
        ProtocolSpec { kind, branch, params, k: 1, engine: Engine::Effective, interpretation: Interpretation::default() }
    }

    pub fn with_k(mut self, k: u32) -> Self {
        self.k = k;
        self
    }

    pub fn with_engine(mut self, engine: Engine) -> Self {
        self.engine = engine;
        self
    }

    pub fn with_interpretation(mut self, interpretation: Interpretation) -> Self {
        self.interpretation = interpretation;
        self
    }

    /// Structural requirements; regime conditions only produce flags.
    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        if self.k == 0 {
            return Err(Error::InvalidParameter("k must be at least 1".into()));
        }
        let combined = self.branch == Branch::Combined;
        match self.kind {
            ProtocolKind::Ghz | ProtocolKind::SixDim if !combined => Err(Error::InvalidParameter(format!(
                "{} needs the combined branch",
                self.kind
            ))),
            ProtocolKind::ThreeDimEntangle | ProtocolKind::BellState | ProtocolKind::Swap if combined => Err(
                Error::InvalidParameter(format!("{} runs on a single branch (left or right)", self.kind)),
            ),
            _ => Ok(()),
        }
    }

    /// Regime conditions the protocol assumes but does not enforce.
    pub fn flags(&self) -> Vec<String> {
        let p = &self.params;
        let mut flags = Vec::new();
        let differs = |a: f64, b: f64| (a - b).abs() > RATE_MATCH_TOL * a.abs().max(b.abs());
        let secondary = |side: Side| match side {
            Side::Left => p.omega2,
            Side::Right => p.omega3,
        };
        match self.kind {
            ProtocolKind::StateTransfer | ProtocolKind::ThreeDimEntangle | ProtocolKind::BellState | ProtocolKind::SixDim => {
                if self.branch.sides().iter().any(|&s| secondary(s) != 0.0) {
                    flags.push("secondary_drive_nonzero".into());
                }
            }
            ProtocolKind::Swap | ProtocolKind::Ghz => {
                if self.branch.sides().iter().any(|&s| differs(p.omega1, secondary(s))) {
                    flags.push("unequal_drives".into());
                }
                if self.k % 2 == 0 {
                    flags.push("even_k_returns_initial_state".into());
                }
            }
        }
        match self.kind {
            ProtocolKind::ThreeDimEntangle | ProtocolKind::SixDim if differs(p.g, p.lambda) => {
                flags.push("g_not_equal_lambda".into());
            }
            ProtocolKind::BellState if p.g / p.lambda > BELL_REGIME_LIMIT => flags.push("g_over_lambda_above_0.2".into()),
            _ => {}
        }
        if self.branch == Branch::Combined && differs(quadrature_drive(p, Side::Left), quadrature_drive(p, Side::Right)) {
            flags.push("unequal_sector_drives".into());
        }
        if zeno_ratio(p, self.branch) > 0.1 {
            flags.push("weak_zeno_separation".into());
        }
        flags
    }
}

#[derive(Clone, Debug)]
pub enum FinalState {
    Pure(StateVector),
    Mixed(DensityMatrix),
}

impl FinalState {
    pub fn fidelity(&self, target: &StateVector) -> Result<f64> {
        match self {
            FinalState::Pure(psi) => {
                if !psi.space().same_as(target.space()) {
                    return Err(Error::Dimension(format!("state on {} vs target on {}", psi.space(), target.space())));
                }
                psi.normalized()?.overlap(&target.normalized()?)
            }
            FinalState::Mixed(rho) => rho.fidelity(target),
        }
    }

    pub fn space(&self) -> &Arc<HilbertSpace> {
        match self {
            FinalState::Pure(psi) => psi.space(),
            FinalState::Mixed(rho) => rho.space(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct ProtocolResult {
    pub spec: ProtocolSpec,
    pub tau: f64,
    /// State on the branch space right after evolution.
    pub evolved: StateVector,
    pub final_state: FinalState,
    pub target: StateVector,
    pub fidelity: f64,
    /// Across atom `a` versus the other kept atoms.
    pub negativity: Option<f64>,
    pub success_probability: Option<f64>,
    pub flags: Vec<String>,
    pub zeno_ratio: f64,
}

/// Output of the fiber readout.
#[derive(Clone, Debug)]
pub struct Reduction {
    pub state: DensityMatrix,
    pub success_probability: Option<f64>,
}

/// Applies a Hadamard gate to each of `modes`, then either traces everything
/// outside `keep` or first conditions every gated mode on the post-selected
/// outcome (the success probability is the joint outcome weight).
pub fn hadamard_and_reduce(
    psi: &StateVector,
    modes: &[usize],
    keep: &[usize],
    interpretation: Interpretation,
) -> Result<Reduction> {
    let h = hadamard();
    let mut state = psi.normalized()?;
    for &m in modes {
        state = apply_mode_gate(&state, m, &h)?;
    }
    match interpretation {
        Interpretation::Trace => Ok(Reduction { state: state.reduce(keep)?, success_probability: None }),
        Interpretation::PostSelect(outcome) => {
            let mut probability = 1.0;
            for &m in modes {
                let (projected, p) = project_mode(&state, m, outcome)?;
                state = projected;
                probability *= p;
            }
            Ok(Reduction { state: state.reduce(keep)?, success_probability: Some(probability) })
        }
    }
}

fn levels(side: Side) -> (Level, Level, Level) {
    match side {
        Side::Left => (Level::Fl, Level::El, Level::Gl),
        Side::Right => (Level::Fr, Level::Er, Level::Gr),
    }
}

fn partner(side: Side) -> Atom {
    match side {
        Side::Left => Atom::B,
        Side::Right => Atom::C,
    }
}

fn fiber(side: Side) -> ModeLabel {
    match side {
        Side::Left => ModeLabel::Fl,
        Side::Right => ModeLabel::Fr,
    }
}

/// Atoms kept for scoring, in model order.
fn kept_atoms(branch: Branch) -> Vec<Atom> {
    match branch {
        Branch::Left => vec![Atom::A, Atom::B],
        Branch::Right => vec![Atom::A, Atom::C],
        Branch::Combined => vec![Atom::A, Atom::B, Atom::C],
    }
}

fn atom_space(atoms: &[Atom]) -> Result<Arc<HilbertSpace>> {
    let specs: Vec<SubsystemSpec> = atoms.iter().map(|&a| SubsystemSpec::Atom(a)).collect();
    build_space(&specs)
}

/// Normalized superposition of atom configurations with the given weights.
fn atom_ket(space: &Arc<HilbertSpace>, atoms: &[Atom], terms: &[(&[Level], f64)]) -> Result<StateVector> {
    let terms = terms
        .iter()
        .map(|(lv, w)| {
            let locals = atoms
                .iter()
                .zip(lv.iter())
                .map(|(a, l)| {
                    a.local_index(*l)
                        .ok_or_else(|| Error::InvalidParameter(format!("atom {a:?} has no level {}", l.symbol())))
                })
                .collect::<Result<Vec<u8>>>()?;
            Ok((BasisState::new(locals), C64::new(*w, 0.0)))
        })
        .collect::<Result<Vec<_>>>()?;
    StateVector::from_terms(space.clone(), &terms)?.normalized()
}

/// `(|e g> - |g g> + |g e>) / sqrt3` on atom `a` and the partner of `side`.
fn three_term_target(side: Side, space: &Arc<HilbertSpace>) -> Result<StateVector> {
    let (_, e, g) = levels(side);
    atom_ket(space, &[Atom::A, partner(side)], &[(&[e, g], 1.0), (&[g, g], -1.0), (&[g, e], 1.0)])
}

fn target_on(spec: &ProtocolSpec, sys: &BranchSystem) -> Result<StateVector> {
    let sides = spec.branch.sides();
    let sum_over_sides = |f: &dyn Fn(Side) -> Result<StateVector>| -> Result<StateVector> {
        let mut acc = StateVector::zeros(sys.space().clone());
        for &s in sides {
            acc = acc.add(&f(s)?)?;
        }
        acc.normalized()
    };
    match spec.kind {
        ProtocolKind::StateTransfer => {
            let basis = crate::zeno::analytic_dark_bright(sys)?;
            Ok(basis.dark[2].scaled(C64::new(0.0, -1.0)))
        }
        ProtocolKind::Swap | ProtocolKind::Ghz => sum_over_sides(&|s| sys.chain_ket(s, crate::model::CHAIN_LEN - 1)),
        ProtocolKind::ThreeDimEntangle => {
            let side = sides[0];
            three_term_target(side, &atom_space(&kept_atoms(spec.branch))?)
        }
        ProtocolKind::BellState => {
            let side = sides[0];
            let (_, e, g) = levels(side);
            let atoms = kept_atoms(spec.branch);
            atom_ket(&atom_space(&atoms)?, &atoms, &[(&[e, g], 1.0), (&[g, e], 1.0)])
        }
        ProtocolKind::SixDim => {
            let atoms = kept_atoms(spec.branch);
            let space = atom_space(&atoms)?;
            use Level::*;
            // Left sector: a and b move on left levels, c rests in g_r; right
            // sector: a and c move on right levels, b rests in g_l.
            let terms: [(&[Level], f64); 6] = [
                (&[Er, Gl, Gr], 1.0),
                (&[Gr, Gl, Gr], -1.0),
                (&[Gr, Gl, Er], 1.0),
                (&[El, Gl, Gr], 1.0),
                (&[Gl, Gl, Gr], -1.0),
                (&[Gl, El, Gr], 1.0),
            ];
            atom_ket(&space, &atoms, &terms)
        }
    }
}

/// The normalized target ket of a protocol: on the branch space for state
/// transfer, swap and GHZ, on the kept atoms otherwise.
pub fn target_state(spec: &ProtocolSpec) -> Result<StateVector> {
    spec.validate()?;
    let sys = BranchSystem::new(spec.params, spec.branch)?;
    target_on(spec, &sys)
}

/// Runs a protocol on an already built branch system.
pub fn run_on(spec: &ProtocolSpec, sys: &BranchSystem) -> Result<ProtocolResult> {
    spec.validate()?;
    if sys.branch() != spec.branch || *sys.params() != spec.params {
        return Err(Error::InvalidParameter("branch system does not match the protocol spec".into()));
    }
    let tau = solve_timing(spec.kind.timing(spec.k), &spec.params, spec.branch)?;
    let psi0 = sys.initial_state();
    let evolved = match spec.engine {
        Engine::Effective => EffectiveEvolution::new(sys)?.evolve(&psi0, tau)?,
        Engine::FullRestricted => Propagator::new(&sys.parts().total)?.evolve(&psi0, tau)?,
    };

    let atoms = kept_atoms(spec.branch);
    let keep: Vec<usize> = atoms.iter().map(|&a| sys.position(a)).collect();
    let target = target_on(spec, sys)?;

    let (final_state, reduced, success_probability) = match spec.kind {
        ProtocolKind::StateTransfer | ProtocolKind::Swap | ProtocolKind::Ghz => {
            let reduced = evolved.reduce(&keep)?;
            (FinalState::Pure(evolved.clone()), reduced, None)
        }
        ProtocolKind::BellState => {
            let reduced = evolved.reduce(&keep)?;
            (FinalState::Mixed(reduced.clone()), reduced, None)
        }
        ProtocolKind::ThreeDimEntangle | ProtocolKind::SixDim => {
            let modes: Vec<usize> = spec.branch.sides().iter().map(|&s| sys.mode(fiber(s))).collect();
            let out = hadamard_and_reduce(&evolved, &modes, &keep, spec.interpretation)?;
            (FinalState::Mixed(out.state.clone()), out.state, out.success_probability)
        }
    };
    let fidelity = final_state.fidelity(&target)?;
    // Atom `a` is always the first kept subsystem.
    let negativity = Some(reduced.negativity(&[0])?);

    Ok(ProtocolResult {
        spec: *spec,
        tau,
        evolved,
        final_state,
        target,
        fidelity,
        negativity,
        success_probability,
        flags: spec.flags(),
        zeno_ratio: zeno_ratio(&spec.params, spec.branch),
    })
}

pub fn run(spec: &ProtocolSpec) -> Result<ProtocolResult> {
    spec.validate()?;
    let sys = BranchSystem::new(spec.params, spec.branch)?;
    run_on(spec, &sys)
}
