//! Brute-force stroboscopic dynamics.
//!
//! States are pushed through each segment in small steps with the series
//! exponential only. Nothing here touches the closed-form propagators, so
//! agreement with [`crate::floquet`] is a check between independent routes.

use num_complex::Complex64;
use thiserror::Error;

use crate::drive::DriveProtocol;
use crate::floquet::{monodromy, FloquetError};
use crate::su2::{expm, mat_mul, AlgebraError, Mat2, I};

/// States whose norm exceeds this are not propagated further.
pub const NORM_CEILING: f64 = 1e150;

pub const DEFAULT_SUBSTEPS: usize = 8;

/// Growth-rate fits skip this many periods of transient by default.
pub const DEFAULT_DISCARD: usize = 100;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DynamicsError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Floquet(#[from] FloquetError),
}

/// Amplitudes on the σz eigenbasis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StateVector {
    pub a: Complex64,
    pub b: Complex64,
}

impl StateVector {
    pub fn new(a: Complex64, b: Complex64) -> Self {
        Self { a, b }
    }

    pub fn up() -> Self {
        Self::new(Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0))
    }

    pub fn down() -> Self {
        Self::new(Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0))
    }

    pub fn norm_sq(&self) -> f64 {
        self.a.norm_sqr() + self.b.norm_sqr()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn apply(&self, m: &Mat2) -> Self {
        let e = m.to_elements();
        Self::new(
            e[0][0] * self.a + e[0][1] * self.b,
            e[1][0] * self.a + e[1][1] * self.b,
        )
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self::new(self.a - other.a, self.b - other.b)
    }

    /// The four fixed initial states used by [`stroboscopic_check`]:
    /// `|↑⟩`, `|↓⟩`, `(|↑⟩ + |↓⟩)/√2` and `(|↑⟩ + i|↓⟩)/√2`.
    pub fn probe_basis() -> [Self; 4] {
        let r = std::f64::consts::FRAC_1_SQRT_2;
        [
            Self::up(),
            Self::down(),
            Self::new(Complex64::new(r, 0.0), Complex64::new(r, 0.0)),
            Self::new(Complex64::new(r, 0.0), Complex64::new(0.0, r)),
        ]
    }
}

/// States sampled at `t = mT`, starting with the initial state at `t = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub period: f64,
    pub times: Vec<f64>,
    /// `|ψ|²` at each sample.
    pub norm_sq: Vec<f64>,
    pub states: Vec<StateVector>,
    /// Propagation stopped early because the norm passed [`NORM_CEILING`].
    pub truncated: bool,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn last_state(&self) -> Option<&StateVector> {
        self.states.last()
    }
}

/// `exp(−i H_j T_j / substeps)` for both segments.
pub fn step_propagators(p: &DriveProtocol, substeps: usize) -> Result<[Mat2; 2], DynamicsError> {
    if substeps == 0 {
        return Err(DynamicsError::InvalidArgument(
            "substeps must be positive".into(),
        ));
    }
    let step = |s: &crate::drive::SegmentParams| {
        expm(&s.hamiltonian().scale(-I * (s.duration / substeps as f64)))
    };
    Ok([step(p.seg0())?, step(p.seg1())?])
}

/// One period assembled from sub-step products, without reference to any state.
pub fn period_propagator(p: &DriveProtocol, substeps: usize) -> Result<Mat2, DynamicsError> {
    let [s0, s1] = step_propagators(p, substeps)?;
    let steps = substeps as u64;
    Ok(mat_mul(&s1.powi(steps), &s0.powi(steps)))
}

pub fn propagate_periods(
    p: &DriveProtocol,
    psi0: StateVector,
    m: usize,
    substeps_per_segment: usize,
) -> Result<Trajectory, DynamicsError> {
    if m < 1 {
        return Err(DynamicsError::InvalidArgument(
            "need at least one period".into(),
        ));
    }
    if substeps_per_segment < 4 {
        return Err(DynamicsError::InvalidArgument(
            "need at least four substeps per segment".into(),
        ));
    }
    let [step0, step1] = step_propagators(p, substeps_per_segment)?;
    let period = p.period();
    let mut traj = Trajectory {
        period,
        times: Vec::with_capacity(m + 1),
        norm_sq: Vec::with_capacity(m + 1),
        states: Vec::with_capacity(m + 1),
        truncated: false,
    };
    let mut psi = psi0;
    traj.times.push(0.0);
    traj.norm_sq.push(psi.norm_sq());
    traj.states.push(psi);
    for k in 1..=m {
        for _ in 0..substeps_per_segment {
            psi = psi.apply(&step0);
        }
        for _ in 0..substeps_per_segment {
            psi = psi.apply(&step1);
        }
        let norm_sq = psi.norm_sq();
        if norm_sq.is_nan() || norm_sq.sqrt() > NORM_CEILING {
            traj.truncated = true;
            break;
        }
        traj.times.push(k as f64 * period);
        traj.norm_sq.push(norm_sq);
        traj.states.push(psi);
    }
    Ok(traj)
}

/// Largest relative deviation, over [`StateVector::probe_basis`], between
/// `m` periods of sub-stepped propagation and `U_effᵐ ψ0`.
pub fn stroboscopic_check(p: &DriveProtocol, m: usize) -> Result<f64, DynamicsError> {
    let u_eff = monodromy(p)?.u_eff;
    let power = u_eff.powi(m as u64);
    let mut worst = 0.0_f64;
    for psi0 in StateVector::probe_basis() {
        let traj = propagate_periods(p, psi0, m, DEFAULT_SUBSTEPS)?;
        if traj.truncated {
            return Err(DynamicsError::InvalidArgument(format!(
                "norm exceeded {NORM_CEILING:e} before {m} periods"
            )));
        }
        let expected = psi0.apply(&power);
        let got = traj.last_state().copied().unwrap_or(psi0);
        worst = worst.max(got.sub(&expected).norm() / expected.norm());
    }
    Ok(worst)
}

/// Least-squares slope of `ln |ψ|²` against time after dropping the first
/// `discard` samples. Tends to `2|Im E₊|` in a broken phase and 0 otherwise.
pub fn growth_rate(traj: &Trajectory, discard: usize) -> Result<f64, DynamicsError> {
    if traj.len() <= discard + 10 {
        return Err(DynamicsError::InvalidArgument(format!(
            "trajectory of {} samples is too short to discard {discard}",
            traj.len()
        )));
    }
    let ts = &traj.times[discard..];
    let ys: Vec<f64> = traj.norm_sq[discard..].iter().map(|n| n.ln()).collect();
    if ys.iter().all(|&y| y == ys[0]) {
        return Ok(0.0);
    }
    let count = ts.len() as f64;
    let t_mean = ts.iter().sum::<f64>() / count;
    let y_mean = ys.iter().sum::<f64>() / count;
    let (mut num, mut den) = (0.0, 0.0);
    for (t, y) in ts.iter().zip(&ys) {
        num += (t - t_mean) * (y - y_mean);
        den += (t - t_mean) * (t - t_mean);
    }
    Ok(num / den)
}

/// Eigenvalues `(tr ± √(tr² − 4 det)) / 2` of a 2×2 matrix.
pub fn eigenvalues(m: &Mat2) -> (Complex64, Complex64) {
    let tr = m.trace();
    let disc = (tr * tr - m.det() * 4.0).sqrt();
    ((tr + disc) / 2.0, (tr - disc) / 2.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::drive::SegmentParams;
    use crate::floquet::{pi_closed_form, quasi_energies};

    fn proto(d0: f64, d1: f64, g0: f64, g1: f64, t0: f64, t1: f64) -> DriveProtocol {
        DriveProtocol::new(
            SegmentParams::new(d0, g0, t0),
            SegmentParams::new(d1, g1, t1),
        )
        .unwrap()
    }

    #[test]
    fn hermitian_drive_conserves_norm() {
        let p = proto(1.0, 0.3, 0.0, 0.0, 0.9, 1.7);
        let traj = propagate_periods(&p, StateVector::probe_basis()[3], 100, 8).unwrap();
        assert_eq!(traj.len(), 101);
        for n in &traj.norm_sq {
            assert!((n - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn argument_checks() {
        let p = proto(1.0, 1.0, 0.1, 0.0, 1.0, 1.0);
        assert!(propagate_periods(&p, StateVector::up(), 0, 8).is_err());
        assert!(propagate_periods(&p, StateVector::up(), 5, 3).is_err());
        let traj = propagate_periods(&p, StateVector::up(), 5, 4).unwrap();
        assert!(growth_rate(&traj, 0).is_err());
    }

    #[test]
    fn symmetric_phase_stays_bounded() {
        let p = proto(1.0, 1.0, 0.2, 0.0, 1.0, 1.0);
        assert!(pi_closed_form(&p).abs() < 1.0);
        let traj = propagate_periods(&p, StateVector::up(), 1000, 4).unwrap();
        let max = traj.norm_sq.iter().cloned().fold(f64::MIN, f64::max);
        let min = traj.norm_sq.iter().cloned().fold(f64::MAX, f64::min);
        assert!(max / min < 10.0, "{max} / {min}");
        assert!(growth_rate(&traj, DEFAULT_DISCARD).unwrap().abs() < 1e-3);
    }

    #[test]
    fn diagonal_gain_rate_is_exact() {
        let p = proto(0.0, 0.0, 0.4, 0.0, 1.0, 1.0);
        let traj = propagate_periods(&p, StateVector::probe_basis()[2], 300, 4).unwrap();
        let rate = growth_rate(&traj, DEFAULT_DISCARD).unwrap();
        assert!((rate - 0.2).abs() < 1e-9, "{rate}");
    }

    #[test]
    fn overflow_truncates() {
        let p = proto(0.0, 0.0, 40.0, 0.0, 1.0, 1.0);
        let traj = propagate_periods(&p, StateVector::up(), 100, 4).unwrap();
        assert!(traj.truncated);
        assert!(traj.len() < 101);
        assert!(traj.norm_sq.iter().all(|n| n.is_finite()));
    }

    #[test]
    fn constant_norm_fit_is_zero() {
        let traj = Trajectory {
            period: 1.0,
            times: (0..20).map(f64::from).collect(),
            norm_sq: vec![2.0; 20],
            states: vec![StateVector::up(); 20],
            truncated: false,
        };
        assert_eq!(growth_rate(&traj, 5).unwrap(), 0.0);
    }

    #[test]
    fn single_period_agrees_with_closed_form() {
        let p = proto(0.7, -1.3, 0.4, 1.9, 0.8, 2.1);
        assert!(stroboscopic_check(&p, 1).unwrap() < 1e-10);
    }

    #[test]
    fn eigenvalues_match_quasi_energies() {
        for p in [
            proto(1.0, 1.0, 0.2, 0.0, 3.0, 3.0),
            proto(1.0, 1.0, 0.2, 0.0, 1.0, 1.0),
            proto(0.0, 0.0, 0.4, 0.0, 1.0, 1.0),
        ] {
            let u = monodromy(&p).unwrap().u_eff;
            let (l1, l2) = eigenvalues(&u);
            let q = quasi_energies(pi_closed_form(&p), p.omega());
            let t = p.period();
            let e1 = (-I * q.e_plus * t).exp();
            let e2 = (-I * q.e_minus * t).exp();
            let direct = (l1 - e1).norm().max((l2 - e2).norm());
            let swapped = (l1 - e2).norm().max((l2 - e1).norm());
            assert!(direct.min(swapped) < 1e-10, "{direct} {swapped}");
        }
    }
}
