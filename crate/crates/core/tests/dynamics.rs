mod common;

use std::f64::consts::{FRAC_PI_2, PI};

use common::*;
use nalgebra::{DMatrix, DVector};
use rand::Rng;
use zenofiber::dynamics::{
    analytic_dark_state, compare_full_vs_effective, evolve_matrix, solve_timing, AnalyticCoefficients, Propagator,
    Timing,
};
use zenofiber::model::{Branch, BranchSystem, UniformParams};
use zenofiber::statespace::OperatorMatrix;

/// `(lambda/(g chi)) (O1 |D0><D2| + O_last |D1><D2| + h.c.)`, built by hand.
fn three_level(p: &UniformParams, last: f64) -> DMatrix<zenofiber::C64> {
    let chi = (1.0 + 2.0 * p.lambda.powi(2) / p.g.powi(2)).sqrt();
    let k = p.lambda / (p.g * chi);
    let mut m = DMatrix::zeros(3, 3);
    m[(0, 2)] = c(k * p.omega1);
    m[(2, 0)] = c(k * p.omega1);
    m[(1, 2)] = c(k * last);
    m[(2, 1)] = c(k * last);
    m
}

#[test]
fn closed_form_coefficients_match_three_level_evolution() {
    let mut r = rng(21);
    let start = DVector::from_vec(vec![c(1.0), c(0.0), c(0.0)]);
    for _ in 0..100 {
        let p = random_params(&mut r, 0.01, 10.0);
        let branch = if r.gen_bool(0.5) { Branch::Left } else { Branch::Right };
        let last = if branch == Branch::Left { p.omega2 } else { p.omega3 };
        let tau = r.gen_range(0.0..50.0) / p.omega1.max(last);
        let closed = analytic_dark_state(&p, branch, tau).unwrap();
        let numeric = evolve_matrix(&three_level(&p, last), &start, tau).unwrap();
        assert!((closed - numeric).norm() < 1e-10);
    }
}

#[test]
fn coefficients_are_normalized_and_periodic() {
    let mut r = rng(22);
    for _ in 0..200 {
        let p = random_params(&mut r, 0.01, 10.0);
        let a = AnalyticCoefficients::new(&p, zenofiber::model::Side::Left).unwrap();
        let phi = r.gen_range(-20.0..20.0);
        let x = a.at_phase(phi);
        let y = a.at_phase(phi + 2.0 * PI);
        let total: f64 = x.iter().map(|z| z.norm_sqr()).sum();
        assert!((total - 1.0).abs() < 1e-10);
        for (u, v) in x.iter().zip(&y) {
            assert!((u - v).norm() < 1e-10);
        }
    }
    let a = AnalyticCoefficients::new(&UniformParams::new(1.0, 1.0, 0.3, 0.2, 0.0), zenofiber::model::Side::Left).unwrap();
    let at0 = a.at(0.0);
    for (z, e) in at0.iter().zip([1.0, 0.0, 0.0]) {
        assert!((z - c(e)).norm() < 1e-12);
    }
}

#[test]
fn state_transfer_to_minus_i_d2() {
    let p = UniformParams::new(1.0, 1.0, 0.01, 0.0, 0.0);
    let tau = solve_timing(Timing::HalfPi(1), &p, Branch::Left).unwrap();
    assert!((tau - FRAC_PI_2 * 3f64.sqrt() / 0.01).abs() < 1e-9);
    let x = analytic_dark_state(&p, Branch::Left, tau).unwrap();
    assert!((x[2] - zenofiber::C64::new(0.0, -1.0)).norm() < 1e-12);
}

#[test]
fn swap_phase_gives_minus_d1() {
    let o = 0.01 / 2f64.sqrt();
    let p = UniformParams::new(1.0, 1.0, o, o, 0.0);
    let tau = solve_timing(Timing::Pi(1), &p, Branch::Left).unwrap();
    let x = analytic_dark_state(&p, Branch::Left, tau).unwrap();
    assert!((x - DVector::from_vec(vec![c(0.0), c(-1.0), c(0.0)])).norm() < 1e-12);
}

#[test]
fn effective_tracks_exact_evolution_in_the_zeno_regime() {
    let at_ratio = |ratio: f64| {
        let p = UniformParams::new(1.0, 1.0, ratio, 0.0, 0.0);
        let sys = BranchSystem::new(p, Branch::Left).unwrap();
        let tau = solve_timing(Timing::HalfPi(1), &p, Branch::Left).unwrap();
        let report = compare_full_vs_effective(&sys, &[tau]).unwrap();
        assert!((report.zeno_ratio - ratio).abs() < 1e-15);
        report.points[0].fidelity
    };
    let f001 = at_ratio(0.01);
    let f01 = at_ratio(0.1);
    assert!(f001 >= 0.98, "{f001}");
    assert!(f001 >= f01, "{f001} vs {f01}");
}

#[test]
fn exact_propagation_is_unitary_and_conserves_energy() {
    let p = UniformParams::new(0.8, 1.3, 0.05, 0.04, 0.07);
    for branch in [Branch::Left, Branch::Combined] {
        let sys = BranchSystem::new(p, branch).unwrap();
        let h = &sys.parts().total;
        let prop = Propagator::new(h).unwrap();
        let psi0 = sys.initial_state();
        let e0 = h.expectation(&psi0).unwrap().re;
        for t in [0.0, 1.0, 17.5, 300.0] {
            let u = prop.unitary(t);
            let uu = u.entries().adjoint() * u.entries();
            let id = OperatorMatrix::identity(sys.space().clone());
            assert!(max_diff(&uu, id.entries()) < 1e-10);
            let psi = prop.evolve(&psi0, t).unwrap();
            assert!((psi.norm() - 1.0).abs() < 1e-10);
            assert!((h.expectation(&psi).unwrap().re - e0).abs() < 1e-9);
        }
        assert!((prop.evolve(&psi0, 0.0).unwrap().overlap(&psi0).unwrap() - 1.0).abs() < 1e-12);
    }
}
