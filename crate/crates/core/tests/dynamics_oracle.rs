mod common;

use common::{at_frequency, one_sided, proto, random_protocol, rng};
use floquet_pt::dynamics::{
    eigenvalues, growth_rate, period_propagator, propagate_periods, step_propagators,
    stroboscopic_check, StateVector, DEFAULT_DISCARD,
};
use floquet_pt::su2::mat_mul;
use floquet_pt::{monodromy, pi_closed_form, quasi_energies, ComplexScalar, Mat2};

#[test]
fn one_period_matches_monodromy_for_random_protocols() {
    let mut r = rng(21);
    for _ in 0..50 {
        let p = random_protocol(&mut r, 2.0, 0.1, 3.0);
        assert!(stroboscopic_check(&p, 1).unwrap() < 1e-10, "{p:?}");
    }
}

#[test]
fn fifty_periods_symmetric_and_broken() {
    let symmetric = proto(1.0, 1.0, 0.2, 0.0, 1.0, 1.0);
    assert!(pi_closed_form(&symmetric).abs() < 1.0);
    assert!(stroboscopic_check(&symmetric, 50).unwrap() < 1e-8);

    let broken = one_sided(1.0, 0.2);
    assert!(pi_closed_form(&broken) < -1.0);
    assert!(stroboscopic_check(&broken, 50).unwrap() < 1e-7);
}

#[test]
fn doubling_substeps_changes_nothing() {
    let mut r = rng(23);
    for _ in 0..20 {
        let p = random_protocol(&mut r, 2.0, 0.1, 3.0);
        let psi0 = StateVector::probe_basis()[3];
        let a = propagate_periods(&p, psi0, 20, 8).unwrap();
        let b = propagate_periods(&p, psi0, 20, 16).unwrap();
        if a.truncated || b.truncated {
            continue;
        }
        let (sa, sb) = (a.last_state().unwrap(), b.last_state().unwrap());
        assert!(sa.sub(sb).norm() / sb.norm() < 1e-11);
    }
}

#[test]
fn substep_propagators_are_unimodular() {
    let one = ComplexScalar::new(1.0, 0.0);
    let mut r = rng(29);
    for _ in 0..20 {
        let p = random_protocol(&mut r, 1.0, 0.1, 1.0);
        let [s0, s1] = step_propagators(&p, 8).unwrap();
        assert!((s0.det() - one).norm() < 1e-12);
        assert!((s1.det() - one).norm() < 1e-12);
    }
    // protocols whose monodromy stays bounded over 1000 periods
    for p in [
        proto(1.0, 0.4, 0.0, 0.0, 0.7, 1.9),
        proto(1.0, 1.0, 0.2, 0.0, 1.0, 1.0),
    ] {
        assert!(pi_closed_form(&p).abs() < 1.0);
        let period = period_propagator(&p, 8).unwrap();
        let mut acc = Mat2::identity();
        for _ in 0..1000 {
            acc = mat_mul(&period, &acc);
        }
        assert!((acc.det() - one).norm() < 1e-9);
    }
}

#[test]
fn monodromy_eigenvalues_are_quasi_energy_phases() {
    let i = ComplexScalar::new(0.0, 1.0);
    let mut r = rng(31);
    for _ in 0..500 {
        let p = random_protocol(&mut r, 2.0, 0.1, 2.0);
        let u = monodromy(&p).unwrap().u_eff;
        let (l1, l2) = eigenvalues(&u);
        let q = quasi_energies(pi_closed_form(&p), p.omega());
        let t = p.period();
        let (e1, e2) = ((-i * q.e_plus * t).exp(), (-i * q.e_minus * t).exp());
        let scale = l1.norm().max(l2.norm()).max(1.0);
        let direct = (l1 - e1).norm().max((l2 - e2).norm());
        let swapped = (l1 - e2).norm().max((l2 - e1).norm());
        // the EP band maps |Π| within 1e-9 of 1 onto h = 0, so allow √(2·1e-9)
        let tol = if q.label.variant == floquet_pt::PhaseVariant::ExceptionalPoint {
            1e-4
        } else {
            1e-10
        };
        assert!(direct.min(swapped) / scale < tol, "{p:?}");
    }
}

#[test]
fn growth_rates_match_imaginary_quasi_energy() {
    for p in [
        one_sided(1.0, 0.2),
        at_frequency(3.0, 0.4, (1.0, 1.0), (3.5, 0.0)),
    ] {
        let q = quasi_energies(pi_closed_form(&p), p.omega());
        let traj = propagate_periods(&p, StateVector::up(), 300, 8).unwrap();
        assert!(!traj.truncated);
        let rate = growth_rate(&traj, DEFAULT_DISCARD).unwrap();
        let expected = 2.0 * q.e_plus.im.abs();
        assert!(
            (rate - expected).abs() / expected < 1e-2,
            "{rate} vs {expected}"
        );
    }
}

#[test]
fn symmetric_growth_rate_vanishes() {
    let p = proto(1.0, 1.0, 0.0, 0.0, 1.0, 1.3);
    let traj = propagate_periods(&p, StateVector::up(), 300, 8).unwrap();
    assert!(growth_rate(&traj, DEFAULT_DISCARD).unwrap().abs() < 1e-6);
}
