//! Closed-form Floquet quantities checked against the series-exponential route.

mod common;

use std::f64::consts::PI;

use common::{one_sided, proto, random_protocol, rel_diff, rng};
use floquet_pt::drive::segment_propagator;
use floquet_pt::floquet::{effective_hamiltonian_with_branch, quasi_energies_with_tol};
use floquet_pt::su2::{expm, mat_mul};
use floquet_pt::{
    classify, effective_hamiltonian, monodromy, pi_closed_form, quasi_energies, ComplexScalar,
    DriveProtocol, Mat2, PhaseVariant, DEFAULT_EP_TOL,
};

const I: ComplexScalar = ComplexScalar::new(0.0, 1.0);

fn series_monodromy(p: &DriveProtocol) -> Mat2 {
    let u = |s: &floquet_pt::SegmentParams| expm(&s.hamiltonian().scale(-I * s.duration)).unwrap();
    mat_mul(&u(p.seg1()), &u(p.seg0()))
}

fn elements_of(d: f64, g: f64) -> [[ComplexScalar; 2]; 2] {
    let c = |re, im| ComplexScalar::new(re, im);
    [
        [c(0.0, g / 2.0), c(d / 2.0, 0.0)],
        [c(d / 2.0, 0.0), c(0.0, -g / 2.0)],
    ]
}

#[test]
fn hermitian_resonant_product_matches_element_product() {
    let p = proto(1.0, 1.0, 0.0, 0.0, PI, PI);
    let u0 = segment_propagator(p.seg0()).to_elements();
    let u1 = segment_propagator(p.seg1()).to_elements();
    let mut direct = [[ComplexScalar::new(0.0, 0.0); 2]; 2];
    for r in 0..2 {
        for c in 0..2 {
            direct[r][c] = u1[r][0] * u0[0][c] + u1[r][1] * u0[1][c];
        }
    }
    let m = monodromy(&p).unwrap();
    assert!(m.u_eff.max_elem_diff(&Mat2::from_elements(direct)) < 1e-15);
    // (−iσx)² = −I
    assert!(m.u_eff.max_elem_diff(&Mat2::identity().scale_re(-1.0)) < 1e-15);
}

#[test]
fn hamiltonian_elements_are_the_segment_matrix() {
    let s = floquet_pt::SegmentParams::new(1.0, 0.2, 1.0);
    assert_eq!(s.hamiltonian().to_elements(), elements_of(1.0, 0.2));
}

#[test]
fn fig1_protocol_at_resonance() {
    let p = one_sided(1.0, 0.2);
    let oracle = series_monodromy(&p).trace().re / 2.0;
    let m = monodromy(&p).unwrap();
    assert!((m.pi_value - oracle).abs() < 1e-11);
    // independent value from a dense-matrix exponential
    assert!((oracle - -1.0201067809382698).abs() < 1e-10);
    let l = classify(m.pi_value, DEFAULT_EP_TOL);
    assert_eq!((l.variant, l.n), (PhaseVariant::BrokenN1, 1));

    let q = quasi_energies(m.pi_value, p.omega());
    assert!((q.e_plus.re - 0.5).abs() < 1e-15);
    assert!((q.e_minus.re - 0.5).abs() < 1e-15);
    assert!((q.e_plus.im - 0.03186261248307052).abs() < 1e-9);
    assert_eq!(q.e_minus.im, -q.e_plus.im);
}

#[test]
fn fig2_protocol_below_half_frequency_breaks_with_n0() {
    let p = one_sided(0.495, 0.2);
    let oracle = series_monodromy(&p).trace().re / 2.0;
    let pi_value = pi_closed_form(&p);
    assert!((pi_value - oracle).abs() < 1e-11);
    assert!((pi_value - 1.0000209718807986).abs() < 1e-10);
    assert_eq!(
        classify(pi_value, DEFAULT_EP_TOL).variant,
        PhaseVariant::BrokenN0
    );
}

#[test]
fn sigma_y_dissipation_appears_for_mixed_drive() {
    let p = proto(1.0, 0.0, 0.0, 0.3, 1.0, 1.0);
    let h = effective_hamiltonian(&p);
    assert!(h.well_conditioned);
    assert!(h.gamma_y.abs() > 1e-3, "{h:?}");
    let rebuilt = h.propagator(p.period()).unwrap();
    assert!(rel_diff(&rebuilt, &series_monodromy(&p)) < 1e-8);
}

#[test]
fn antisymmetric_dissipation_has_no_gamma_z() {
    let p = proto(1.0, 1.0, 0.2, -0.2, 2.0, 2.0);
    let h = effective_hamiltonian(&p);
    assert_eq!(h.gamma_z, 0.0);
    assert!(h.gamma_y != 0.0);
    let rebuilt = h.propagator(p.period()).unwrap();
    assert!(rel_diff(&rebuilt, &monodromy(&p).unwrap().u_eff) < 1e-8);
}

#[test]
fn random_ensemble_invariants() {
    let mut r = rng(7);
    for _ in 0..2000 {
        let p = random_protocol(&mut r, 3.0, 0.05, 5.0);
        let m = monodromy(&p).unwrap();
        let scale = m.u_eff.norm().max(1.0);

        assert!(m.trace_imag_residual < 1e-10 * scale);
        assert!((m.u_eff.det() - ComplexScalar::new(1.0, 0.0)).norm() < 1e-10 * scale * scale);
        assert!((pi_closed_form(&p) - m.pi_value).abs() < 1e-11 * scale);
        assert!(rel_diff(&m.u_eff, &series_monodromy(&p)) < 1e-10);

        let swapped = monodromy(&p.swapped()).unwrap();
        assert!((swapped.pi_value - m.pi_value).abs() < 1e-11 * scale);
        assert_eq!(
            classify(swapped.pi_value, 1e-6).variant,
            classify(m.pi_value, 1e-6).variant
        );
    }
}

#[test]
fn quasi_energy_branch_round_trip() {
    let mut r = rng(11);
    for _ in 0..2000 {
        let p = random_protocol(&mut r, 3.0, 0.05, 5.0);
        let pi_value = pi_closed_form(&p);
        let t = p.period();
        let q = quasi_energies_with_tol(pi_value, p.omega(), DEFAULT_EP_TOL);
        assert!(
            (q.e_plus + q.e_minus - ComplexScalar::new(f64::from(q.label.n) * p.omega(), 0.0))
                .norm()
                < 1e-10
        );
        match q.label.variant {
            PhaseVariant::PTSymmetric => {
                assert_eq!(q.e_plus.im, 0.0);
                assert!(q.h_value.re >= 0.0 && q.h_value.re <= p.omega() / 2.0);
                assert!(((q.h_value.re * t).cos() - pi_value).abs() < 1e-12);
            }
            PhaseVariant::BrokenN0 | PhaseVariant::BrokenN1 => {
                let sign = if q.label.n == 1 { -1.0 } else { 1.0 };
                let back = sign * (q.h_value.im * t).cosh();
                assert!((back - pi_value).abs() < 1e-12 * pi_value.abs().max(1.0));
                assert!(q.e_plus.im > 0.0 && q.e_plus.im == -q.e_minus.im);
                assert!((q.e_plus.re - f64::from(q.label.n) * p.omega() / 2.0).abs() < 1e-12);
            }
            PhaseVariant::ExceptionalPoint => assert_eq!(q.h_value, ComplexScalar::new(0.0, 0.0)),
        }
    }
}

#[test]
fn effective_hamiltonian_reconstructs_monodromy() {
    let mut r = rng(13);
    let mut checked = 0;
    for _ in 0..1000 {
        let p = random_protocol(&mut r, 3.0, 0.05, 5.0);
        let h = effective_hamiltonian(&p);
        if !h.well_conditioned {
            continue;
        }
        checked += 1;
        let u = monodromy(&p).unwrap().u_eff;
        assert!(
            rel_diff(&h.propagator(p.period()).unwrap(), &u) < 1e-8,
            "{p:?} {h:?}"
        );

        let two_h_sq = 4.0 * {
            let q = quasi_energies(pi_closed_form(&p), p.omega());
            let hv = q.h_value;
            (hv * hv).re
        };
        let scale =
            h.j.abs()
                .max(h.gamma_y.abs())
                .max(h.gamma_z.abs())
                .powi(2)
                .max(1e-12);
        assert!((h.two_h_squared() - two_h_sq).abs() / scale < 1e-8, "{p:?}");
    }
    assert!(checked > 900);
}

#[test]
fn alternative_branch_in_symmetric_phase_is_equivalent() {
    let mut r = rng(17);
    let mut checked = 0;
    while checked < 300 {
        let p = random_protocol(&mut r, 2.0, 0.05, 3.0);
        let pi_value = pi_closed_form(&p);
        if classify(pi_value, DEFAULT_EP_TOL).variant != PhaseVariant::PTSymmetric {
            continue;
        }
        let h0 = effective_hamiltonian_with_branch(&p, 0).unwrap();
        let h1 = effective_hamiltonian_with_branch(&p, 1).unwrap();
        if !(h0.well_conditioned && h1.well_conditioned) {
            continue;
        }
        checked += 1;
        let u0 = h0.propagator(p.period()).unwrap();
        let u1 = h1.propagator(p.period()).unwrap();
        assert!(rel_diff(&u0, &u1) < 1e-8, "{p:?}");
    }
}
