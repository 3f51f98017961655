//! One-period evolution, the phase function Π, quasi-energies and the
//! effective Hamiltonian.
//!
//! Π is half the trace of the monodromy `U_eff = U_1 U_0`. It is computed both
//! from the matrix product and from the closed form
//!
//! ```text
//! Π = cos(h1T1) cos(h0T0) + ¼ (γ1γ0 − Δ1Δ0) T1T0 sinc(h1T1) sinc(h0T0)
//! ```
//!
//! `|Π| < 1` is the PT-symmetric phase, `Π > 1` the broken phase with `n = 0`
//! and `Π < −1` the broken phase with `n = 1`, whose effective Hamiltonian
//! carries an extra `ω/2` on the identity.
//!
//! Quasi-energies are reported on the principal Floquet branch only; the full
//! set is `E± + lω` for every integer `l`.

use std::f64::consts::PI;

use num_complex::Complex64;
use thiserror::Error;

use crate::drive::{segment_propagator, DriveError, DriveProtocol};
use crate::su2::{cos_even_raw, expm, mat_mul, sinc_even_raw, AlgebraError, Mat2, I};

/// Default half-width of the exceptional-point band around `|Π| = 1`.
pub const DEFAULT_EP_TOL: f64 = 1e-9;

/// Extraction of `J, Γy, Γz` is flagged as ill-conditioned below this `|sinc(hT)|`.
pub const SINC_CONDITION_FLOOR: f64 = 1e-6;

const TRACE_IMAG_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FloquetError {
    #[error(transparent)]
    Drive(#[from] DriveError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error("internal consistency: Im tr U_eff = {residual:.3e} (expected real trace)")]
    ComplexTrace { residual: f64 },
    #[error("non-finite monodromy")]
    NonFinite,
    #[error("branch n = {n} cannot represent Π = {pi_value} with real couplings")]
    BranchUnavailable { n: u8, pi_value: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonodromyResult {
    pub u_eff: Mat2,
    pub pi_value: f64,
    /// `|Im tr U_eff|`; zero up to rounding for every valid protocol.
    pub trace_imag_residual: f64,
}

/// Builds `U_eff = U_1(T_1)·U_0(T_0)` from the closed-form segment propagators.
pub fn monodromy(p: &DriveProtocol) -> Result<MonodromyResult, FloquetError> {
    let u_eff = mat_mul(&segment_propagator(p.seg1()), &segment_propagator(p.seg0()));
    if !u_eff.is_finite() {
        return Err(FloquetError::NonFinite);
    }
    let tr = u_eff.trace();
    let trace_imag_residual = tr.im.abs();
    if trace_imag_residual >= TRACE_IMAG_TOL * tr.re.abs().max(1.0) {
        return Err(FloquetError::ComplexTrace {
            residual: trace_imag_residual,
        });
    }
    let pi_value = tr.re / 2.0;
    debug_assert!(
        {
            let closed = pi_closed_form(p);
            (closed - pi_value).abs() <= 1e-11 * pi_scale(p)
        },
        "closed-form Π disagrees with the monodromy trace"
    );
    Ok(MonodromyResult {
        u_eff,
        pi_value,
        trace_imag_residual,
    })
}

/// Magnitude of the two terms that make up Π; rounding error in Π is relative to this.
pub(crate) fn pi_scale(p: &DriveProtocol) -> f64 {
    let [s0, s1] = p.segments();
    let (q0, q1) = (s0.phase_sq(), s1.phase_sq());
    let first = (cos_even_raw(q1) * cos_even_raw(q0)).abs();
    let second = (0.25
        * (s1.gamma * s0.gamma - s1.delta * s0.delta)
        * s0.duration
        * s1.duration
        * sinc_even_raw(q1)
        * sinc_even_raw(q0))
    .abs();
    (first + second).max(1.0)
}

/// Π from the closed form, without building any matrix.
pub fn pi_closed_form(p: &DriveProtocol) -> f64 {
    let [s0, s1] = p.segments();
    let (q0, q1) = (s0.phase_sq(), s1.phase_sq());
    cos_even_raw(q1) * cos_even_raw(q0)
        + 0.25
            * (s1.gamma * s0.gamma - s1.delta * s0.delta)
            * s1.duration
            * s0.duration
            * sinc_even_raw(q1)
            * sinc_even_raw(q0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PhaseVariant {
    PTSymmetric,
    BrokenN0,
    BrokenN1,
    ExceptionalPoint,
}

impl PhaseVariant {
    pub fn as_str(&self) -> &'static str {
        match self {
            PhaseVariant::PTSymmetric => "PTSymmetric",
            PhaseVariant::BrokenN0 => "BrokenN0",
            PhaseVariant::BrokenN1 => "BrokenN1",
            PhaseVariant::ExceptionalPoint => "ExceptionalPoint",
        }
    }

    pub fn is_broken(&self) -> bool {
        matches!(self, PhaseVariant::BrokenN0 | PhaseVariant::BrokenN1)
    }
}

impl std::fmt::Display for PhaseVariant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for PhaseVariant {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "PTSymmetric" => Ok(PhaseVariant::PTSymmetric),
            "BrokenN0" => Ok(PhaseVariant::BrokenN0),
            "BrokenN1" => Ok(PhaseVariant::BrokenN1),
            "ExceptionalPoint" => Ok(PhaseVariant::ExceptionalPoint),
            other => Err(format!("unknown phase label `{other}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseLabel {
    pub variant: PhaseVariant,
    /// Branch index: 1 only for `Π < 0` broken or exceptional points.
    pub n: u8,
    /// `|Π| − 1`; positive means broken.
    pub margin: f64,
}

pub fn classify(pi_value: f64, ep_tol: f64) -> PhaseLabel {
    let margin = pi_value.abs() - 1.0;
    let variant = if margin.abs() <= ep_tol {
        PhaseVariant::ExceptionalPoint
    } else if margin < 0.0 {
        PhaseVariant::PTSymmetric
    } else if pi_value > 0.0 {
        PhaseVariant::BrokenN0
    } else {
        PhaseVariant::BrokenN1
    };
    let n = match variant {
        PhaseVariant::BrokenN1 => 1,
        PhaseVariant::ExceptionalPoint if pi_value < 0.0 => 1,
        _ => 0,
    };
    PhaseLabel { variant, n, margin }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuasiEnergies {
    pub e_plus: Complex64,
    pub e_minus: Complex64,
    /// `h` with `E± = ±h + nω/2`; real in the symmetric phase, imaginary when broken.
    pub h_value: Complex64,
    pub label: PhaseLabel,
}

/// Quasi-energies on the principal branch, classified with [`DEFAULT_EP_TOL`].
pub fn quasi_energies(pi_value: f64, omega: f64) -> QuasiEnergies {
    quasi_energies_with_tol(pi_value, omega, DEFAULT_EP_TOL)
}

pub fn quasi_energies_with_tol(pi_value: f64, omega: f64, ep_tol: f64) -> QuasiEnergies {
    let period = 2.0 * PI / omega;
    let label = classify(pi_value, ep_tol);
    let h_value = match label.variant {
        PhaseVariant::PTSymmetric => Complex64::new(pi_value.acos() / period, 0.0),
        PhaseVariant::BrokenN0 => Complex64::new(0.0, pi_value.acosh() / period),
        PhaseVariant::BrokenN1 => Complex64::new(0.0, (-pi_value).acosh() / period),
        PhaseVariant::ExceptionalPoint => Complex64::new(0.0, 0.0),
    };
    let offset = Complex64::new(f64::from(label.n) * omega / 2.0, 0.0);
    QuasiEnergies {
        e_plus: h_value + offset,
        e_minus: -h_value + offset,
        h_value,
        label,
    }
}

/// `H_eff = (J/2) σx + i (Γy/2 σy + Γz/2 σz) + (nω/2) I`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EffectiveHamiltonian {
    pub j: f64,
    pub gamma_y: f64,
    pub gamma_z: f64,
    pub n: u8,
    pub well_conditioned: bool,
}

impl EffectiveHamiltonian {
    pub fn matrix(&self, omega: f64) -> Mat2 {
        Mat2::from_pauli(
            Complex64::new(f64::from(self.n) * omega / 2.0, 0.0),
            Complex64::new(self.j / 2.0, 0.0),
            Complex64::new(0.0, self.gamma_y / 2.0),
            Complex64::new(0.0, self.gamma_z / 2.0),
        )
    }

    /// `(2h)² = J² − Γy² − Γz²`.
    pub fn two_h_squared(&self) -> f64 {
        self.j * self.j - self.gamma_y * self.gamma_y - self.gamma_z * self.gamma_z
    }

    /// `exp(−i H_eff T)` by the series exponential.
    pub fn propagator(&self, period: f64) -> Result<Mat2, AlgebraError> {
        expm(&self.matrix(2.0 * PI / period).scale(-I * period))
    }
}

/// Effective Hamiltonian on the branch the phase label selects
/// (`n = 0` throughout the symmetric phase).
pub fn effective_hamiltonian(p: &DriveProtocol) -> EffectiveHamiltonian {
    let pi_value = pi_closed_form(p);
    let n = classify(pi_value, DEFAULT_EP_TOL).n;
    extract(p, pi_value, n).expect("the classified branch always admits real couplings")
}

/// Effective Hamiltonian on an explicit branch. In the symmetric phase both
/// `n = 0` and `n = 1` reproduce the same monodromy; in a broken phase only the
/// branch matching the sign of Π does.
pub fn effective_hamiltonian_with_branch(
    p: &DriveProtocol,
    n: u8,
) -> Result<EffectiveHamiltonian, FloquetError> {
    extract(p, pi_closed_form(p), n)
}

fn extract(p: &DriveProtocol, pi_value: f64, n: u8) -> Result<EffectiveHamiltonian, FloquetError> {
    let sign = if n.is_multiple_of(2) { 1.0 } else { -1.0 };
    // cos(hT) = (−1)^n Π
    let target = sign * pi_value;
    let ht_sq = if target > 1.0 {
        -target.acosh().powi(2)
    } else if target >= -1.0 {
        target.acos().powi(2)
    } else {
        return Err(FloquetError::BranchUnavailable { n, pi_value });
    };
    let [s0, s1] = p.segments();
    let (q0, q1) = (s0.phase_sq(), s1.phase_sq());
    let (c0, c1) = (cos_even_raw(q0), cos_even_raw(q1));
    let (k0, k1) = (sinc_even_raw(q0), sinc_even_raw(q1));
    let (t0, t1) = (s0.duration, s1.duration);
    let period = t0 + t1;
    let sinc_ht = sinc_even_raw(ht_sq);
    let prefactor = sign / (period * sinc_ht);

    let j = prefactor * (s0.delta * t0 * c1 * k0 + s1.delta * t1 * c0 * k1);
    let gamma_y = prefactor / 2.0 * (s0.delta * s1.gamma - s1.delta * s0.gamma) * t0 * t1 * k1 * k0;
    let gamma_z = prefactor * (s0.gamma * t0 * c1 * k0 + s1.gamma * t1 * c0 * k1);
    Ok(EffectiveHamiltonian {
        j,
        gamma_y,
        gamma_z,
        n,
        well_conditioned: sinc_ht.abs() >= SINC_CONDITION_FLOOR,
    })
}

/// Everything the engine knows about one protocol.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FloquetResult {
    pub monodromy: MonodromyResult,
    pub label: PhaseLabel,
    pub quasi: QuasiEnergies,
    pub effective: EffectiveHamiltonian,
}

pub fn analyze(p: &DriveProtocol, ep_tol: f64) -> Result<FloquetResult, FloquetError> {
    let monodromy = monodromy(p)?;
    let quasi = quasi_energies_with_tol(monodromy.pi_value, p.omega(), ep_tol);
    let effective = extract(p, monodromy.pi_value, quasi.label.n)?;
    Ok(FloquetResult {
        monodromy,
        label: quasi.label,
        quasi,
        effective,
    })
}
