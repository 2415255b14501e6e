use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use super::decomposition::decompose;
use crate::linalg::{fix_phase, C64};
use crate::model::{restrict, Branch, BranchSystem, Side, UniformParams, CHAIN_LEN};
use crate::statespace::{HilbertSpace, OperatorMatrix, StateVector};
use crate::{Error, Result};

/// Bright eigenvalues: `B0 -> +g`, `B1 -> -g`, `B2 -> +g chi`, `B3 -> -g chi`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BrightLabel {
    B0,
    B1,
    B2,
    B3,
}

impl BrightLabel {
    pub const ALL: [BrightLabel; 4] = [BrightLabel::B0, BrightLabel::B1, BrightLabel::B2, BrightLabel::B3];

    pub fn predicted(self, p: &UniformParams) -> f64 {
        match self {
            BrightLabel::B0 => p.g,
            BrightLabel::B1 => -p.g,
            BrightLabel::B2 => p.g * p.chi(),
            BrightLabel::B3 => -p.g * p.chi(),
        }
    }
}

/// How a state combines the two polarization sectors.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Parity {
    Single(Side),
    /// `(X + X') / sqrt2`
    Sum,
    /// `(X - X') / sqrt2`
    Difference,
}

#[derive(Clone, Debug)]
pub struct BrightState {
    pub label: BrightLabel,
    pub parity: Parity,
    pub eigenvalue: f64,
    pub state: StateVector,
}

/// Dark and bright eigenbasis of the strong Hamiltonian of a branch.
///
/// For a single sector `dark` is `[D0, D1, D2]`. For the combined branch it is
/// `[(D0+D0')/sqrt2, (D1+D1')/sqrt2, (D2+D2')/sqrt2]` followed by the three
/// differences, which completes the six-dimensional dark space.
#[derive(Clone, Debug)]
pub struct DarkBrightBasis {
    pub branch: Branch,
    pub chi: f64,
    pub dark: Vec<StateVector>,
    pub bright: Vec<BrightState>,
    /// Predicted spectrum of one sector: `0, 0, 0, g, -g, g chi, -g chi`.
    pub eigenvalues: Vec<f64>,
}

impl DarkBrightBasis {
    /// Dark states as the columns of a matrix.
    pub fn dark_matrix(&self) -> DMatrix<C64> {
        let cols: Vec<DVector<C64>> = self.dark.iter().map(|d| d.amplitudes().clone()).collect();
        DMatrix::from_columns(&cols)
    }

    /// `D^H H D`: an operator compressed onto the dark space.
    pub fn compress(&self, op: &OperatorMatrix) -> Result<DMatrix<C64>> {
        for d in &self.dark {
            if !d.space().same_as(op.space()) {
                return Err(Error::Dimension(format!("dark basis on {} vs operator on {}", d.space(), op.space())));
            }
        }
        let d = self.dark_matrix();
        Ok(d.adjoint() * op.entries() * &d)
    }

    pub fn dark_projector(&self) -> Result<OperatorMatrix> {
        let vectors: Vec<DVector<C64>> = self.dark.iter().map(|d| d.amplitudes().clone()).collect();
        OperatorMatrix::projector(self.dark[0].space().clone(), &vectors)
    }
}

fn single_sector_dark(sys: &BranchSystem, side: Side) -> Result<[StateVector; 3]> {
    let p = sys.params();
    let d0 = sys.chain_ket(side, 0)?;
    let d1 = sys.chain_ket(side, CHAIN_LEN - 1)?;
    let c = p.dark_coupling();
    let d2 = sys
        .chain_ket(side, 1)?
        .add(&sys.chain_ket(side, 3)?.scaled(C64::new(-p.g / p.lambda, 0.0)))?
        .add(&sys.chain_ket(side, 5)?)?
        .scaled(C64::new(c, 0.0));
    Ok([d0, d1, d2])
}

fn sector_space(sys: &BranchSystem, side: Side) -> Result<Arc<HilbertSpace>> {
    let states = (0..CHAIN_LEN)
        .map(|i| {
            let ket = sys.chain_ket(side, i)?;
            let idx = ket.amplitudes().iter().position(|z| z.re == 1.0).expect("basis ket");
            Ok(sys.space().state(idx).clone())
        })
        .collect::<Result<Vec<_>>>()?;
    HilbertSpace::restricted(sys.space().subsystems().to_vec(), states)
}

fn classify(eigenvalue: f64, p: &UniformParams) -> BrightLabel {
    BrightLabel::ALL
        .into_iter()
        .min_by(|a, b| {
            (a.predicted(p) - eigenvalue)
                .abs()
                .total_cmp(&(b.predicted(p) - eigenvalue).abs())
        })
        .unwrap()
}

/// Bright eigenvectors of one sector from the numeric eigensolver, phase-fixed,
/// embedded into the branch space and ordered B0..B3.
fn single_sector_bright(sys: &BranchSystem, side: Side) -> Result<Vec<BrightState>> {
    let sector = sector_space(sys, side)?;
    let strong = restrict(&sys.parts().strong, &sector)?;
    let dec = decompose(&strong, None)?;
    let p = sys.params();
    let mut out = Vec::new();
    for cluster in dec.clusters.iter().filter(|c| c.eigenvalue.abs() > dec.width) {
        if cluster.multiplicity != 1 {
            return Err(Error::Degenerate(format!(
                "bright eigenvalue {} has multiplicity {}",
                cluster.eigenvalue, cluster.multiplicity
            )));
        }
        let mut v = cluster.vectors[0].clone();
        fix_phase(&mut v);
        let state = StateVector::new(sector.clone(), v)?.embed_into(sys.space())?;
        out.push(BrightState { label: classify(cluster.eigenvalue, p), parity: Parity::Single(side), eigenvalue: cluster.eigenvalue, state });
    }
    let zero = dec.zero_cluster().map_or(0, |c| c.multiplicity);
    if out.len() != 4 || zero != 3 {
        return Err(Error::Degenerate(format!("expected 3 dark and 4 bright states, found {zero} and {}", out.len())));
    }
    out.sort_by_key(|b| b.label as u8);
    if out.windows(2).any(|w| w[0].label == w[1].label) {
        return Err(Error::Degenerate("bright eigenvalues could not be labeled uniquely".into()));
    }
    Ok(out)
}

/// Dark states from their closed forms, bright states from the eigensolver.
pub fn analytic_dark_bright(sys: &BranchSystem) -> Result<DarkBrightBasis> {
    let p = *sys.params();
    if !(p.g > 0.0) || !(p.lambda > 0.0) {
        return Err(Error::Degenerate(format!("dark structure needs g > 0 and lambda > 0 (g = {}, lambda = {})", p.g, p.lambda)));
    }
    let chi = p.chi();
    let eigenvalues = vec![0.0, 0.0, 0.0, p.g, -p.g, p.g * chi, -p.g * chi];
    let (dark, bright) = match sys.branch() {
        Branch::Left | Branch::Right => {
            let side = sys.branch().sides()[0];
            (single_sector_dark(sys, side)?.to_vec(), single_sector_bright(sys, side)?)
        }
        Branch::Combined => {
            let r = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
            let left = single_sector_dark(sys, Side::Left)?;
            let right = single_sector_dark(sys, Side::Right)?;
            let mut dark = Vec::with_capacity(6);
            for (l, rr) in left.iter().zip(&right) {
                dark.push(l.add(rr)?.scaled(r));
            }
            for (l, rr) in left.iter().zip(&right) {
                dark.push(l.add(&rr.scaled(-C64::new(1.0, 0.0)))?.scaled(r));
            }
            let bl = single_sector_bright(sys, Side::Left)?;
            let br = single_sector_bright(sys, Side::Right)?;
            let mut bright = Vec::with_capacity(8);
            for (parity, sign) in [(Parity::Sum, 1.0), (Parity::Difference, -1.0)] {
                for (l, rr) in bl.iter().zip(&br) {
                    bright.push(BrightState {
                        label: l.label,
                        parity,
                        eigenvalue: 0.5 * (l.eigenvalue + rr.eigenvalue),
                        state: l.state.add(&rr.state.scaled(C64::new(sign, 0.0)))?.scaled(r),
                    });
                }
            }
            (dark, bright)
        }
    };
    Ok(DarkBrightBasis { branch: sys.branch(), chi, dark, bright, eigenvalues })
}

/// Three-level effective Hamiltonian of one sector in the basis `(D0, D1, D2)`:
/// `lambda/(g chi) (Omega1 |D0><D2| + Omega_last |D1><D2| + h.c.)`, with
/// `Omega_last = Omega2` on the left and `Omega3` on the right.
pub fn analytic_effective_matrix(p: &UniformParams, side: Side) -> DMatrix<C64> {
    let c = p.dark_coupling();
    let last = match side {
        Side::Left => p.omega2,
        Side::Right => p.omega3,
    };
    let mut m = DMatrix::zeros(3, 3);
    m[(0, 2)] = C64::new(c * p.omega1, 0.0);
    m[(2, 0)] = m[(0, 2)];
    m[(1, 2)] = C64::new(c * last, 0.0);
    m[(2, 1)] = m[(1, 2)];
    m
}

/// Largest principal angle between the spans of two sets of vectors.
///
/// Computed from the sine side, `sigma_max((I - Q_b Q_b^H) Q_a)`, which stays
/// accurate for nearly coincident subspaces. Returns `pi/2` when the
/// dimensions differ.
pub fn max_principal_angle(a: &[DVector<C64>], b: &[DVector<C64>]) -> f64 {
    if a.len() != b.len() || a.is_empty() {
        return std::f64::consts::FRAC_PI_2;
    }
    let qa = DMatrix::from_columns(a).qr().q();
    let qb = DMatrix::from_columns(b).qr().q();
    let residual = &qa - &qb * (qb.adjoint() * &qa);
    let s = residual.singular_values().max();
    s.min(1.0).asin()
}

/// Bright states from the closed-form prefactors and signs, unnormalized:
/// `B0 = 1/2 (-phi1 - phi2 + phi4 + phi5)`,
/// `B1 = 1/2 (-phi1 + phi2 - phi4 + phi5)`,
/// `B2 = 2 chi (phi1 + chi phi2 + (lambda/g) phi3 - chi phi4 + phi5)`,
/// `B3 = 2 chi (phi1 - chi phi2 + (lambda/g) phi3 - chi phi4 + phi5)`.
pub fn formula_bright(sys: &BranchSystem, side: Side) -> Result<Vec<(BrightLabel, StateVector)>> {
    let p = sys.params();
    let chi = p.chi();
    let ratio = p.lambda / p.g;
    let table: [(BrightLabel, f64, [f64; 5]); 4] = [
        (BrightLabel::B0, 0.5, [-1.0, -1.0, 0.0, 1.0, 1.0]),
        (BrightLabel::B1, 0.5, [-1.0, 1.0, 0.0, -1.0, 1.0]),
        (BrightLabel::B2, 2.0 * chi, [1.0, chi, ratio, -chi, 1.0]),
        (BrightLabel::B3, 2.0 * chi, [1.0, -chi, ratio, -chi, 1.0]),
    ];
    table
        .iter()
        .map(|(label, prefactor, coeffs)| {
            let mut v = StateVector::zeros(sys.space().clone());
            for (k, c) in coeffs.iter().enumerate() {
                v = v.add(&sys.chain_ket(side, k + 1)?.scaled(C64::new(prefactor * c, 0.0)))?;
            }
            Ok((*label, v))
        })
        .collect()
}

/// How a closed-form bright state compares with the numeric eigenvector.
#[derive(Clone, Debug)]
pub struct FormulaBrightCheck {
    pub side: Side,
    pub label: BrightLabel,
    /// Norm of the formula vector as written.
    pub formula_norm: f64,
    /// `||(H - E) b|| ` for the normalized formula vector at the predicted eigenvalue.
    pub residual: f64,
    /// `|<numeric|b>|^2` for the normalized formula vector.
    pub overlap: f64,
}

pub fn compare_formula_bright(sys: &BranchSystem, basis: &DarkBrightBasis) -> Result<Vec<FormulaBrightCheck>> {
    let p = sys.params();
    let strong = &sys.parts().strong;
    let mut out = Vec::new();
    for &side in sys.branch().sides() {
        let numeric = match sys.branch() {
            Branch::Combined => single_sector_bright(sys, side)?,
            _ => basis.bright.clone(),
        };
        for (label, formula) in formula_bright(sys, side)? {
            let formula_norm = formula.norm();
            let unit = formula.normalized()?;
            let e = label.predicted(p);
            let residual = strong.apply(&unit)?.add(&unit.scaled(C64::new(-e, 0.0)))?.norm();
            let reference = numeric.iter().find(|b| b.label == label).expect("all four labels present");
            let overlap = reference.state.overlap(&unit)?;
            out.push(FormulaBrightCheck { side, label, formula_norm, residual, overlap });
        }
    }
    Ok(out)
}
