//! The square-wave drive: two constant Hamiltonians
//! `H_j = (Δ_j/2) σx + i (γ_j/2) σz` applied for `T_0` and then `T_1`.
//!
//! Segment 0 is centred on `t = 0`, so one period runs over
//! `[−T_0/2, T − T_0/2)` and the monodromy is `U_1(T_1)·U_0(T_0)`. Moving the
//! time origin conjugates the monodromy; traces and quasi-energies do not
//! depend on it.
//!
//! Energies are dimensionless and times are in inverse energy units.

use std::f64::consts::PI;

use num_complex::Complex64;
use thiserror::Error;

use crate::su2::{segment_propagator_closed, Mat2};

/// `|h²|` below this value is treated as a static exceptional point.
pub const STATIC_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DriveError {
    #[error("segment {segment}: duration must be positive, got {value}")]
    NonPositiveDuration { segment: usize, value: f64 },
    #[error("segment {segment}: {field} is not finite")]
    NonFinite { segment: usize, field: &'static str },
    #[error("invalid drive parameter: {0}")]
    Invalid(String),
}

/// Coupling `Δ`, dissipation `γ` and duration `T` of one constant segment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SegmentParams {
    pub delta: f64,
    pub gamma: f64,
    pub duration: f64,
}

impl SegmentParams {
    pub const fn new(delta: f64, gamma: f64, duration: f64) -> Self {
        Self {
            delta,
            gamma,
            duration,
        }
    }

    fn check(&self, segment: usize) -> Result<(), DriveError> {
        for (field, value) in [
            ("delta", self.delta),
            ("gamma", self.gamma),
            ("duration", self.duration),
        ] {
            if !value.is_finite() {
                return Err(DriveError::NonFinite { segment, field });
            }
        }
        if self.duration <= 0.0 {
            return Err(DriveError::NonPositiveDuration {
                segment,
                value: self.duration,
            });
        }
        Ok(())
    }

    /// `H = (Δ/2) σx + i (γ/2) σz`.
    pub fn hamiltonian(&self) -> Mat2 {
        Mat2::from_pauli(
            Complex64::new(0.0, 0.0),
            Complex64::new(self.delta / 2.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, self.gamma / 2.0),
        )
    }

    /// `h² = (Δ² − γ²)/4`.
    pub fn h_squared(&self) -> f64 {
        (self.delta * self.delta - self.gamma * self.gamma) / 4.0
    }

    /// `(h·T)²`, the argument of the even kernels for this segment.
    pub fn phase_sq(&self) -> f64 {
        self.h_squared() * self.duration * self.duration
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpectrumRegime {
    RealSpectrum,
    ImaginarySpectrum,
    ExceptionalStatic,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SegmentSpectrum {
    pub h_squared: f64,
    pub regime: SpectrumRegime,
}

impl SegmentSpectrum {
    /// `±√h²` in the real regime, `None` otherwise.
    pub fn real_eigenenergies(&self) -> Option<(f64, f64)> {
        match self.regime {
            SpectrumRegime::RealSpectrum => {
                let h = self.h_squared.sqrt();
                Some((h, -h))
            }
            _ => None,
        }
    }
}

pub fn spectrum(s: &SegmentParams) -> SegmentSpectrum {
    let h_squared = s.h_squared();
    let regime = if h_squared > STATIC_TOL {
        SpectrumRegime::RealSpectrum
    } else if h_squared < -STATIC_TOL {
        SpectrumRegime::ImaginarySpectrum
    } else {
        SpectrumRegime::ExceptionalStatic
    };
    SegmentSpectrum { h_squared, regime }
}

/// `U_j = exp(−i H_j T_j)` from the closed form.
pub fn segment_propagator(s: &SegmentParams) -> Mat2 {
    segment_propagator_closed(s.phase_sq(), s.duration, &s.hamiltonian())
}

/// A validated two-segment protocol.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DriveProtocol {
    seg0: SegmentParams,
    seg1: SegmentParams,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivedQuantities {
    pub period: f64,
    pub omega: f64,
    pub delta_eff: f64,
    pub gamma_eff: f64,
}

impl DriveProtocol {
    pub fn new(seg0: SegmentParams, seg1: SegmentParams) -> Result<Self, DriveError> {
        seg0.check(0)?;
        seg1.check(1)?;
        Ok(Self { seg0, seg1 })
    }

    /// Builds a protocol from the drive frequency and the fraction of the
    /// period spent in segment 0.
    pub fn from_frequency(
        omega: f64,
        t0_fraction: f64,
        delta: (f64, f64),
        gamma: (f64, f64),
    ) -> Result<Self, DriveError> {
        if !(omega.is_finite() && omega > 0.0) {
            return Err(DriveError::Invalid(format!(
                "omega must be positive and finite, got {omega}"
            )));
        }
        if !(t0_fraction > 0.0 && t0_fraction < 1.0) {
            return Err(DriveError::Invalid(format!(
                "t0_fraction must lie strictly between 0 and 1, got {t0_fraction}"
            )));
        }
        let period = 2.0 * PI / omega;
        Self::new(
            SegmentParams::new(delta.0, gamma.0, t0_fraction * period),
            SegmentParams::new(delta.1, gamma.1, (1.0 - t0_fraction) * period),
        )
    }

    pub fn seg0(&self) -> &SegmentParams {
        &self.seg0
    }

    pub fn seg1(&self) -> &SegmentParams {
        &self.seg1
    }

    pub fn segments(&self) -> [SegmentParams; 2] {
        [self.seg0, self.seg1]
    }

    pub fn period(&self) -> f64 {
        self.seg0.duration + self.seg1.duration
    }

    pub fn omega(&self) -> f64 {
        2.0 * PI / self.period()
    }

    pub fn t0_fraction(&self) -> f64 {
        self.seg0.duration / self.period()
    }

    /// Both segments share every parameter, so the Hamiltonian does not
    /// actually depend on time.
    pub fn is_static(&self) -> bool {
        self.seg0.delta == self.seg1.delta && self.seg0.gamma == self.seg1.gamma
    }

    /// The protocol with the two segments exchanged.
    pub fn swapped(&self) -> Self {
        Self {
            seg0: self.seg1,
            seg1: self.seg0,
        }
    }

    pub fn derived(&self) -> DerivedQuantities {
        let period = self.period();
        let (s0, s1) = (&self.seg0, &self.seg1);
        DerivedQuantities {
            period,
            omega: 2.0 * PI / period,
            delta_eff: (s0.delta * s0.duration + s1.delta * s1.duration) / period,
            gamma_eff: (s0.gamma * s0.duration + s1.gamma * s1.duration) / period,
        }
    }
}

/// Re-checks an already constructed protocol. Returns it unchanged when valid.
pub fn validate(p: DriveProtocol) -> Result<DriveProtocol, DriveError> {
    DriveProtocol::new(p.seg0, p.seg1)
}

pub fn derived_quantities(p: &DriveProtocol) -> DerivedQuantities {
    p.derived()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::su2::{expm, mat_mul, I};
    use proptest::prelude::*;

    fn seg(d: f64, g: f64, t: f64) -> SegmentParams {
        SegmentParams::new(d, g, t)
    }

    #[test]
    fn figure_one_protocol_is_valid() {
        let p = DriveProtocol::new(seg(1.0, 0.2, PI), seg(1.0, 0.0, PI)).unwrap();
        assert!((p.omega() - 1.0).abs() < 1e-15);
        assert!(!p.is_static());
    }

    #[test]
    fn zero_duration_is_rejected_with_segment_named() {
        let err = DriveProtocol::new(seg(1.0, 0.2, PI), seg(1.0, 0.0, 0.0)).unwrap_err();
        assert_eq!(
            err,
            DriveError::NonPositiveDuration {
                segment: 1,
                value: 0.0
            }
        );
        assert!(err.to_string().contains("segment 1"));
        let err = DriveProtocol::new(seg(1.0, 0.2, -1.0), seg(1.0, 0.0, 1.0)).unwrap_err();
        assert!(matches!(
            err,
            DriveError::NonPositiveDuration { segment: 0, .. }
        ));
    }

    #[test]
    fn non_finite_parameter_is_rejected() {
        let err = DriveProtocol::new(seg(f64::NAN, 0.2, 1.0), seg(1.0, 0.0, 1.0)).unwrap_err();
        assert_eq!(
            err,
            DriveError::NonFinite {
                segment: 0,
                field: "delta"
            }
        );
        assert!(DriveProtocol::new(seg(1.0, 0.0, 1.0), seg(1.0, f64::INFINITY, 1.0)).is_err());
    }

    #[test]
    fn equal_segments_flag_static_case() {
        let p = DriveProtocol::new(seg(1.0, 0.3, 1.2), seg(1.0, 0.3, 0.7)).unwrap();
        assert!(p.is_static());
        assert_eq!(validate(p).unwrap(), p);
    }

    #[test]
    fn from_frequency_splits_period() {
        let p = DriveProtocol::from_frequency(3.0, 0.4, (1.0, 1.0), (0.5, 0.0)).unwrap();
        let t = 2.0 * PI / 3.0;
        assert!((p.seg0().duration - 0.4 * t).abs() < 1e-15);
        assert!((p.seg1().duration - 0.6 * t).abs() < 1e-15);
        assert!(DriveProtocol::from_frequency(0.0, 0.5, (1.0, 1.0), (0.0, 0.0)).is_err());
        assert!(DriveProtocol::from_frequency(1.0, 1.0, (1.0, 1.0), (0.0, 0.0)).is_err());
    }

    #[test]
    fn spectrum_regimes() {
        let s = spectrum(&seg(1.0, 0.0, 1.0));
        assert_eq!(s.h_squared, 0.25);
        assert_eq!(s.regime, SpectrumRegime::RealSpectrum);
        assert_eq!(s.real_eigenenergies(), Some((0.5, -0.5)));

        let s = spectrum(&seg(0.2, 1.0, 1.0));
        assert!((s.h_squared + 0.24).abs() < 1e-15);
        assert_eq!(s.regime, SpectrumRegime::ImaginarySpectrum);
        assert_eq!(s.real_eigenenergies(), None);

        let s = spectrum(&seg(0.5, 0.5, 1.0));
        assert_eq!(s.h_squared, 0.0);
        assert_eq!(s.regime, SpectrumRegime::ExceptionalStatic);
    }

    #[test]
    fn propagator_half_rotation() {
        let u = segment_propagator(&seg(1.0, 0.0, PI));
        let expected = Mat2::sigma_x().scale(-I);
        assert!(u.max_elem_diff(&expected) < 1e-15);
    }

    #[test]
    fn propagator_pure_gain_is_diagonal_exponential() {
        let u = segment_propagator(&seg(0.0, 0.4, 1.0)).to_elements();
        assert!((u[0][0] - Complex64::new(0.2_f64.exp(), 0.0)).norm() < 1e-15);
        assert!((u[1][1] - Complex64::new((-0.2_f64).exp(), 0.0)).norm() < 1e-15);
        assert_eq!(u[0][1], Complex64::new(0.0, 0.0));
        assert_eq!(u[1][0], Complex64::new(0.0, 0.0));
    }

    #[test]
    fn propagator_matches_series() {
        for s in [seg(1.0, 0.2, PI), seg(1.0, 0.2, 2.5), seg(0.3, 1.7, 2.0)] {
            let oracle = expm(&s.hamiltonian().scale(-I * s.duration)).unwrap();
            assert!(segment_propagator(&s).max_elem_diff(&oracle) < 1e-11);
        }
    }

    #[test]
    fn effective_coupling_and_dissipation() {
        let p = DriveProtocol::new(seg(1.0, 0.0, 1.0), seg(0.0, 0.0, 1.0)).unwrap();
        assert_eq!(p.derived().delta_eff, 0.5);
        let p = DriveProtocol::new(seg(1.0, 0.0, 0.3), seg(1.0, 0.0, 2.9)).unwrap();
        assert!((p.derived().delta_eff - 1.0).abs() < 1e-15);
        let p = DriveProtocol::new(seg(1.0, 0.7, 1.5), seg(1.0, -0.7, 1.5)).unwrap();
        assert_eq!(derived_quantities(&p).gamma_eff, 0.0);
    }

    #[test]
    fn constant_parameters_reproduce_themselves() {
        let p = DriveProtocol::new(seg(0.8, 0.35, 0.9), seg(0.8, 0.35, 2.3)).unwrap();
        let d = p.derived();
        assert!((d.delta_eff - 0.8).abs() < 1e-15);
        assert!((d.gamma_eff - 0.35).abs() < 1e-15);
    }

    proptest! {
        #[test]
        fn static_protocol_reduces_to_single_exponential(
            d in -3.0..3.0_f64, g in -3.0..3.0_f64, t0 in 0.05..4.0_f64, t1 in 0.05..4.0_f64,
        ) {
            let p = DriveProtocol::new(seg(d, g, t0), seg(d, g, t1)).unwrap();
            let product = mat_mul(&segment_propagator(p.seg1()), &segment_propagator(p.seg0()));
            let oracle = expm(&p.seg0().hamiltonian().scale(-I * (t0 + t1))).unwrap();
            let scale = oracle.norm().max(1.0);
            prop_assert!(product.max_elem_diff(&oracle) / scale < 1e-10);
        }

        #[test]
        fn effective_values_survive_segment_swap(
            d0 in -3.0..3.0_f64, d1 in -3.0..3.0_f64, g0 in -3.0..3.0_f64, g1 in -3.0..3.0_f64,
            t0 in 0.05..5.0_f64, t1 in 0.05..5.0_f64,
        ) {
            let p = DriveProtocol::new(seg(d0, g0, t0), seg(d1, g1, t1)).unwrap();
            let (a, b) = (p.derived(), p.swapped().derived());
            prop_assert!((a.delta_eff - b.delta_eff).abs() < 1e-14);
            prop_assert!((a.gamma_eff - b.gamma_eff).abs() < 1e-14);
        }

        #[test]
        fn exchanging_coupling_and_dissipation_flips_regime(
            d in -3.0..3.0_f64, g in -3.0..3.0_f64,
        ) {
            let a = spectrum(&seg(d, g, 1.0));
            let b = spectrum(&seg(g, d, 1.0));
            match a.regime {
                SpectrumRegime::RealSpectrum => prop_assert_eq!(b.regime, SpectrumRegime::ImaginarySpectrum),
                SpectrumRegime::ImaginarySpectrum => prop_assert_eq!(b.regime, SpectrumRegime::RealSpectrum),
                SpectrumRegime::ExceptionalStatic => prop_assert_eq!(b.regime, SpectrumRegime::ExceptionalStatic),
            }
        }

        #[test]
        fn segment_propagators_are_unimodular(
            d in -5.0..5.0_f64, g in -5.0..5.0_f64, t in 0.0..10.0_f64,
        ) {
            let s = seg(d, g, t);
            let u = segment_propagator(&s);
            let scale = u.norm().powi(2).max(1.0);
            prop_assert!((u.det() - Complex64::new(1.0, 0.0)).norm() / scale < 1e-12);
        }
    }
}
