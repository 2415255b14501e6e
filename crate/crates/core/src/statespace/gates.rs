use std::sync::Arc;

use nalgebra::DVector;

use super::space::{BasisState, HilbertSpace, SubsystemSpec};
use super::vector::StateVector;
use super::STRUCTURAL_TOL;
use crate::linalg::{C64, ZERO};
use crate::{Error, Result};

/// 2x2 gate on a `{|0>, |1>}` mode, `gate[out][in]`.
pub type Gate = [[C64; 2]; 2];

/// `|0> -> (|0> + |1>)/sqrt2`, `|1> -> (|0> - |1>)/sqrt2`
pub fn hadamard() -> Gate {
    let h = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    [[h, h], [h, -h]]
}

fn check_unitary(gate: &Gate) -> Result<()> {
    for i in 0..2 {
        for j in 0..2 {
            let mut acc = ZERO;
            for k in 0..2 {
                acc += gate[k][i].conj() * gate[k][j];
            }
            let expected = if i == j { 1.0 } else { 0.0 };
            if (acc - expected).norm() > STRUCTURAL_TOL {
                return Err(Error::InvalidParameter("gate is not unitary".into()));
            }
        }
    }
    Ok(())
}

fn check_two_level_mode(space: &HilbertSpace, mode: usize) -> Result<()> {
    space.check_subsystem(mode)?;
    match space.subsystems()[mode] {
        SubsystemSpec::Mode { cutoff: 1, .. } => Ok(()),
        SubsystemSpec::Mode { label, cutoff } => Err(Error::Unsupported(format!(
            "two-level gate on mode {} with Fock cutoff {cutoff}",
            label.symbol()
        ))),
        other => Err(Error::Unsupported(format!("mode gate on {}", other.name()))),
    }
}

/// Applies `gate` to the `{|0>, |1>}` space of `mode`, identity elsewhere.
///
/// On a restricted space the result lives in that space extended by every
/// state obtained from its basis by flipping the mode occupation; the
/// original states keep their indices and new states are appended in order
/// of discovery.
pub fn apply_mode_gate(psi: &StateVector, mode: usize, gate: &Gate) -> Result<StateVector> {
    let space = psi.space();
    check_two_level_mode(space, mode)?;
    check_unitary(gate)?;

    let target = flip_closure(space, mode)?;
    let mut out = DVector::from_element(target.dim(), ZERO);
    for (i, &z) in psi.amplitudes().iter().enumerate() {
        if z == ZERO {
            continue;
        }
        let state = space.state(i);
        let n_in = state.get(mode) as usize;
        for n_out in 0..2u8 {
            let w = gate[n_out as usize][n_in];
            if w == ZERO {
                continue;
            }
            let j = target.index_of(&state.with(mode, n_out)).expect("flip closure contains all flips");
            out[j] += w * z;
        }
    }
    StateVector::new(target, out)
}

fn flip_closure(space: &Arc<HilbertSpace>, mode: usize) -> Result<Arc<HilbertSpace>> {
    if space.is_full_product() {
        return Ok(space.clone());
    }
    let mut extra: Vec<BasisState> = Vec::new();
    for state in space.basis() {
        let flipped = state.with(mode, 1 - state.get(mode));
        if space.index_of(&flipped).is_none() && !extra.contains(&flipped) {
            extra.push(flipped);
        }
    }
    if extra.is_empty() {
        return Ok(space.clone());
    }
    let mut basis = space.basis().to_vec();
    basis.extend(extra);
    HilbertSpace::restricted(space.subsystems().to_vec(), basis)
}

/// Projects `mode` onto Fock `outcome`, returning the renormalized state and
/// the outcome probability.
pub fn project_mode(psi: &StateVector, mode: usize, outcome: u8) -> Result<(StateVector, f64)> {
    let space = psi.space();
    space.check_subsystem(mode)?;
    let cutoff = match space.subsystems()[mode] {
        SubsystemSpec::Mode { cutoff, .. } => cutoff,
        other => return Err(Error::Unsupported(format!("Fock projection on {}", other.name()))),
    };
    if outcome > cutoff {
        return Err(Error::InvalidParameter(format!("outcome {outcome} above cutoff {cutoff}")));
    }
    let total = psi.norm().powi(2);
    if total == 0.0 {
        return Err(Error::ZeroProbability);
    }
    let amps = DVector::from_fn(psi.dim(), |i, _| {
        if space.state(i).get(mode) == outcome {
            psi.amplitudes()[i]
        } else {
            ZERO
        }
    });
    let weight = amps.norm_squared() / total;
    // Anything at round-off level is treated as an impossible outcome.
    if weight <= 1e-14 {
        return Err(Error::ZeroProbability);
    }
    let projected = StateVector::new(space.clone(), amps)?.normalized()?;
    Ok((projected, weight))
}

/// Outcome distribution of a Fock measurement on a two-level mode.
pub fn outcome_probabilities(psi: &StateVector, mode: usize) -> Result<[f64; 2]> {
    let space = psi.space();
    check_two_level_mode(space, mode)?;
    let total = psi.norm().powi(2);
    if total == 0.0 {
        return Err(Error::ZeroProbability);
    }
    let mut p = [0.0; 2];
    for (i, z) in psi.amplitudes().iter().enumerate() {
        p[space.state(i).get(mode) as usize] += z.norm_sqr();
    }
    Ok([p[0] / total, p[1] / total])
}
