//! Exact and effective time evolution, the closed-form dark-space
//! coefficients, and the protocol timing conditions.

use std::f64::consts::{FRAC_PI_2, PI};

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::linalg::{Spectrum, C64};
use crate::model::{Branch, BranchSystem, Side, UniformParams};
use crate::statespace::{OperatorMatrix, StateVector, STRUCTURAL_TOL};
use crate::zeno::{analytic_dark_bright, DarkBrightBasis};
use crate::{Error, Result};

/// `exp(-i H t)` from a cached eigendecomposition of `H`.
#[derive(Clone, Debug)]
pub struct Propagator {
    generator: OperatorMatrix,
    spectrum: Spectrum,
}

impl Propagator {
    pub fn new(generator: &OperatorMatrix) -> Result<Self> {
        generator.require_hermitian()?;
        let spectrum = Spectrum::hermitian(generator.entries(), STRUCTURAL_TOL)?;
        Ok(Propagator { generator: generator.clone(), spectrum })
    }

    pub fn generator(&self) -> &OperatorMatrix {
        &self.generator
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.spectrum.values
    }

    pub fn evolve(&self, psi: &StateVector, t: f64) -> Result<StateVector> {
        if !psi.space().same_as(self.generator.space()) {
            return Err(Error::Dimension(format!(
                "state on {} vs generator on {}",
                psi.space(),
                self.generator.space()
            )));
        }
        let mut coeffs = self.spectrum.vectors.adjoint_mul(psi.amplitudes());
        for (z, &e) in coeffs.iter_mut().zip(&self.spectrum.values) {
            *z *= C64::from_polar(1.0, -e * t);
        }
        StateVector::new(psi.space().clone(), self.spectrum.vectors.mul(&coeffs))
    }

    pub fn unitary(&self, t: f64) -> OperatorMatrix {
        let u = self.spectrum.reconstruct_with(|e| C64::from_polar(1.0, -e * t));
        OperatorMatrix::new(self.generator.space().clone(), u).expect("same dimension as the generator")
    }
}

/// `exp(-i H t) psi`
pub fn evolve(h: &OperatorMatrix, psi: &StateVector, t: f64) -> Result<StateVector> {
    Propagator::new(h)?.evolve(psi, t)
}

/// `exp(-i H t) x` for a bare Hermitian matrix.
pub fn evolve_matrix(h: &DMatrix<C64>, x: &DVector<C64>, t: f64) -> Result<DVector<C64>> {
    if h.nrows() != x.len() {
        return Err(Error::Dimension(format!("{}x{} generator vs vector of length {}", h.nrows(), h.ncols(), x.len())));
    }
    let s = Spectrum::hermitian(h, STRUCTURAL_TOL)?;
    let mut c = s.vectors.adjoint_mul(x);
    for (z, &e) in c.iter_mut().zip(&s.values) {
        *z *= C64::from_polar(1.0, -e * t);
    }
    Ok(s.vectors.mul(&c))
}

/// Drive strength entering the dark-space dynamics of one sector:
/// `sqrt(Omega1^2 + Omega2^2)` on the left, `sqrt(Omega1^2 + Omega3^2)` on the right.
pub fn quadrature_drive(p: &UniformParams, side: Side) -> f64 {
    match side {
        Side::Left => p.omega1.hypot(p.omega2),
        Side::Right => p.omega1.hypot(p.omega3),
    }
}

/// Mixing angle and drive of one sector, with the closed-form amplitudes on
/// `D0`, `D2`, `D1`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AnalyticCoefficients {
    /// `tan(theta) = Omega_last / Omega1`
    pub theta: f64,
    pub omega: f64,
    /// `lambda / (g chi)`
    pub coupling: f64,
}

impl AnalyticCoefficients {
    pub fn new(p: &UniformParams, side: Side) -> Result<Self> {
        let last = match side {
            Side::Left => p.omega2,
            Side::Right => p.omega3,
        };
        if p.omega1 == 0.0 && last == 0.0 {
            return Err(Error::UndefinedAngle);
        }
        if !(p.g > 0.0) || !(p.lambda > 0.0) {
            return Err(Error::Degenerate(format!("need g > 0 and lambda > 0 (g = {}, lambda = {})", p.g, p.lambda)));
        }
        Ok(AnalyticCoefficients { theta: last.atan2(p.omega1), omega: quadrature_drive(p, side), coupling: p.dark_coupling() })
    }

    /// `Omega lambda tau / (g chi)`
    pub fn phase(&self, tau: f64) -> f64 {
        self.omega * self.coupling * tau
    }

    /// `(A1, A2, A3)` at dark-space phase `phi`.
    pub fn at_phase(&self, phi: f64) -> [C64; 3] {
        let (s, c) = self.theta.sin_cos();
        let a1 = s * s + c * c * phi.cos();
        let a2 = C64::new(0.0, -c * phi.sin());
        let a3 = 0.5 * (2.0 * self.theta).sin() * (phi.cos() - 1.0);
        [C64::new(a1, 0.0), a2, C64::new(a3, 0.0)]
    }

    pub fn at(&self, tau: f64) -> [C64; 3] {
        self.at_phase(self.phase(tau))
    }
}

/// `A1 |D0> + A2 |D2> + A3 |D1>` as components over `(D0, D1, D2)`.
pub fn analytic_dark_state(p: &UniformParams, branch: Branch, tau: f64) -> Result<DVector<C64>> {
    let side = match branch {
        Branch::Left => Side::Left,
        Branch::Right => Side::Right,
        Branch::Combined => {
            return Err(Error::Unsupported("closed-form coefficients describe one sector; evolve the sectors separately".into()))
        }
    };
    let [a1, a2, a3] = AnalyticCoefficients::new(p, side)?.at(tau);
    Ok(DVector::from_vec(vec![a1, a3, a2]))
}

/// Dark-space phase condition `Omega lambda tau / (g chi) = target`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Timing {
    /// `(2k - 1) pi / 2`
    HalfPi(u32),
    /// `k pi`
    Pi(u32),
}

impl Timing {
    pub fn k(self) -> u32 {
        match self {
            Timing::HalfPi(k) | Timing::Pi(k) => k,
        }
    }

    pub fn phase(self) -> f64 {
        match self {
            Timing::HalfPi(k) => (2 * k - 1) as f64 * FRAC_PI_2,
            Timing::Pi(k) => k as f64 * PI,
        }
    }
}

/// Evolution time meeting `condition` for `branch`.
///
/// The combined branch uses the left-sector drive; its two sectors share one
/// clock only when both quadratures agree, which the caller should check.
pub fn solve_timing(condition: Timing, p: &UniformParams, branch: Branch) -> Result<f64> {
    if condition.k() == 0 {
        return Err(Error::InvalidParameter("timing index k must be at least 1".into()));
    }
    let side = branch.sides()[0];
    let omega = quadrature_drive(p, side);
    for (name, v) in [("g", p.g), ("lambda", p.lambda), ("drive", omega)] {
        if !(v > 0.0) || !v.is_finite() {
            return Err(Error::InvalidParameter(format!("timing needs {name} > 0, got {v}")));
        }
    }
    Ok(condition.phase() / (omega * p.dark_coupling()))
}

/// Evolution confined to the dark space: the drive is compressed onto the dark
/// basis, evolved there, and embedded back into the branch space.
#[derive(Clone, Debug)]
pub struct EffectiveEvolution {
    basis: DarkBrightBasis,
    generator: DMatrix<C64>,
}

impl EffectiveEvolution {
    pub fn new(sys: &BranchSystem) -> Result<Self> {
        let basis = analytic_dark_bright(sys)?;
        let generator = basis.compress(&sys.parts().drive)?;
        Ok(EffectiveEvolution { basis, generator })
    }

    pub fn basis(&self) -> &DarkBrightBasis {
        &self.basis
    }

    /// `D^H H_d D`
    pub fn generator(&self) -> &DMatrix<C64> {
        &self.generator
    }

    /// Dark-space coordinates of `psi`.
    pub fn coordinates(&self, psi: &StateVector) -> DVector<C64> {
        self.basis.dark_matrix().ad_mul(psi.amplitudes())
    }

    pub fn evolve(&self, psi: &StateVector, tau: f64) -> Result<StateVector> {
        let x = evolve_matrix(&self.generator, &self.coordinates(psi), tau)?;
        StateVector::new(psi.space().clone(), self.basis.dark_matrix() * x)
    }
}

/// Exact evolution under the full restricted Hamiltonian of a branch.
pub fn evolve_full(sys: &BranchSystem, psi: &StateVector, tau: f64) -> Result<StateVector> {
    evolve(&sys.parts().total, psi, tau)
}

/// `Omega / min(g, lambda)`, the small parameter of the dark-space
/// approximation. The combined branch reports the larger sector drive.
pub fn zeno_ratio(p: &UniformParams, branch: Branch) -> f64 {
    let omega = branch.sides().iter().map(|&s| quadrature_drive(p, s)).fold(0.0, f64::max);
    omega / p.g.min(p.lambda)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ComparisonPoint {
    pub tau: f64,
    /// `|<psi_eff|psi_full>|^2`
    pub fidelity: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub zeno_ratio: f64,
    pub points: Vec<ComparisonPoint>,
}

/// Overlap between dark-space and exact evolution of the branch's initial
/// state at each `tau`.
pub fn compare_full_vs_effective(sys: &BranchSystem, taus: &[f64]) -> Result<ComparisonReport> {
    let psi0 = sys.initial_state();
    let full = Propagator::new(&sys.parts().total)?;
    let eff = EffectiveEvolution::new(sys)?;
    let points = taus
        .iter()
        .map(|&tau| {
            let a = eff.evolve(&psi0, tau)?;
            let b = full.evolve(&psi0, tau)?;
            Ok(ComparisonPoint { tau, fidelity: a.overlap(&b)? })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ComparisonReport { zeno_ratio: zeno_ratio(sys.params(), sys.branch()), points })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::statespace::{build_space, Atom, SubsystemSpec};

    fn qubit_space() -> std::sync::Arc<crate::statespace::HilbertSpace> {
        build_space(&[SubsystemSpec::mode(crate::statespace::ModeLabel::Fl, 1)]).unwrap()
    }

    #[test]
    fn zero_time_is_identity() {
        let space = build_space(&[SubsystemSpec::Atom(Atom::B)]).unwrap();
        let h = OperatorMatrix::new(space.clone(), DMatrix::from_fn(3, 3, |i, j| C64::new((i + j) as f64, 0.0))).unwrap();
        let p = Propagator::new(&h).unwrap();
        let u = p.unitary(0.0);
        assert!(u.max_diff(&OperatorMatrix::identity(space)).unwrap() < 1e-12);
    }

    #[test]
    fn diagonal_generator_gives_phases() {
        let space = build_space(&[SubsystemSpec::Atom(Atom::B)]).unwrap();
        let h = OperatorMatrix::new(space.clone(), DMatrix::from_diagonal(&DVector::from_vec(vec![C64::new(1.0, 0.0), C64::new(-2.0, 0.0), C64::new(0.5, 0.0)]))).unwrap();
        let psi = StateVector::new(space, DVector::from_element(3, C64::new(1.0 / 3f64.sqrt(), 0.0))).unwrap();
        let out = evolve(&h, &psi, 0.7).unwrap();
        for (k, e) in [1.0, -2.0, 0.5].into_iter().enumerate() {
            let expected = C64::from_polar(1.0 / 3f64.sqrt(), -e * 0.7);
            assert!((out.amplitudes()[k] - expected).norm() < 1e-12);
        }
    }

    #[test]
    fn rabi_half_period_inverts() {
        let space = qubit_space();
        let omega = 0.3;
        let h = OperatorMatrix::new(space.clone(), DMatrix::from_row_slice(2, 2, &[C64::new(0.0, 0.0), C64::new(omega, 0.0), C64::new(omega, 0.0), C64::new(0.0, 0.0)])).unwrap();
        let psi = StateVector::basis_ket(space.clone(), 0).unwrap();
        let out = evolve(&h, &psi, FRAC_PI_2 / omega).unwrap();
        assert!((out.amplitudes()[1].norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn non_hermitian_generator_rejected() {
        let space = qubit_space();
        let h = OperatorMatrix::new(space.clone(), DMatrix::from_row_slice(2, 2, &[C64::new(0.0, 0.0), C64::new(1.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0)])).unwrap();
        let psi = StateVector::basis_ket(space, 0).unwrap();
        assert!(matches!(evolve(&h, &psi, 1.0), Err(Error::NotHermitian(_))));
    }

    #[test]
    fn state_transfer_coefficients() {
        let p = UniformParams::new(1.0, 1.0, 0.01, 0.0, 0.0);
        let tau = solve_timing(Timing::HalfPi(1), &p, Branch::Left).unwrap();
        let x = analytic_dark_state(&p, Branch::Left, tau).unwrap();
        assert!(x[0].norm() < 1e-12);
        assert!(x[1].norm() < 1e-12);
        assert!((x[2] - C64::new(0.0, -1.0)).norm() < 1e-12);
    }

    #[test]
    fn swap_coefficients_carry_a_sign() {
        let p = UniformParams::new(1.0, 1.0, 0.01, 0.01, 0.0);
        let tau = solve_timing(Timing::Pi(1), &p, Branch::Left).unwrap();
        let x = analytic_dark_state(&p, Branch::Left, tau).unwrap();
        assert!((x[1] + C64::new(1.0, 0.0)).norm() < 1e-12);
        let tau2 = solve_timing(Timing::Pi(2), &p, Branch::Left).unwrap();
        let y = analytic_dark_state(&p, Branch::Left, tau2).unwrap();
        assert!((y[0] - C64::new(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn timing_values() {
        let p = UniformParams::new(1.0, 1.0, 0.01, 0.0, 0.0);
        let t1 = solve_timing(Timing::HalfPi(1), &p, Branch::Left).unwrap();
        assert!((t1 - FRAC_PI_2 * 3f64.sqrt() / 0.01).abs() < 1e-9);
        let tp = solve_timing(Timing::Pi(1), &p, Branch::Left).unwrap();
        assert!((tp - 2.0 * t1).abs() < 1e-9);
        let t2 = solve_timing(Timing::HalfPi(2), &p, Branch::Left).unwrap();
        assert!((t2 - 3.0 * t1).abs() < 1e-9);
        assert!(solve_timing(Timing::HalfPi(0), &p, Branch::Left).is_err());
        assert!(solve_timing(Timing::HalfPi(1), &UniformParams::new(1.0, 1.0, 0.0, 0.0, 0.0), Branch::Left).is_err());
    }

    #[test]
    fn undefined_angle() {
        let p = UniformParams::new(1.0, 1.0, 0.0, 0.0, 0.5);
        assert!(matches!(analytic_dark_state(&p, Branch::Left, 1.0), Err(Error::UndefinedAngle)));
        assert!(analytic_dark_state(&p, Branch::Right, 1.0).is_ok());
        assert!(analytic_dark_state(&p, Branch::Combined, 1.0).is_err());
    }

    #[test]
    fn undriven_evolutions_agree() {
        let sys = BranchSystem::new(UniformParams::new(1.0, 1.0, 0.0, 0.0, 0.0), Branch::Left).unwrap();
        let report = compare_full_vs_effective(&sys, &[0.0, 1.0, 50.0]).unwrap();
        assert_eq!(report.zeno_ratio, 0.0);
        for pt in report.points {
            assert!((pt.fidelity - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn effective_generator_matches_closed_form() {
        let p = UniformParams::new(0.8, 1.7, 0.02, 0.03, 0.05);
        for (branch, side) in [(Branch::Left, Side::Left), (Branch::Right, Side::Right)] {
            let sys = BranchSystem::new(p, branch).unwrap();
            let eff = EffectiveEvolution::new(&sys).unwrap();
            let expected = crate::zeno::analytic_effective_matrix(&p, side);
            assert!(crate::linalg::max_abs_diff(eff.generator(), &expected) < 1e-12);
        }
    }
}
