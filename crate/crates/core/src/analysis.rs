//! Phase diagrams and the physics read off them.
//!
//! A sweep axis or a search ray is an affine map from one real number into
//! protocol fields, so the same machinery covers frequency scans, dissipation
//! scans and the `(γ0, γ1)` plane alike.

use std::collections::VecDeque;
use std::f64::consts::PI;

use rayon::prelude::*;
use thiserror::Error;

use crate::drive::{DriveError, DriveProtocol, SegmentParams};
use crate::floquet::{
    classify, pi_closed_form, quasi_energies_with_tol, EffectiveHamiltonian, PhaseLabel,
    PhaseVariant, DEFAULT_EP_TOL,
};

pub const DEFAULT_ROOT_TOL: f64 = 1e-10;
const BRACKET_WIDTH_TOL: f64 = 1e-12;
const MAX_ROOT_ITERATIONS: usize = 400;
const BALANCE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AnalysisError {
    #[error(transparent)]
    Drive(#[from] DriveError),
    #[error("no sign change in bracket: g(a) = {g_a:.6e}, g(b) = {g_b:.6e}")]
    NoSignChange { g_a: f64, g_b: f64 },
    #[error("invalid sweep grid: {0}")]
    InvalidGrid(String),
    #[error("invalid ray: {0}")]
    InvalidRay(String),
    #[error("Π is not finite at x = {0}")]
    NonFinite(f64),
}

/// A protocol field an axis can drive.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ProtocolField {
    Delta0,
    Delta1,
    /// Both couplings at once.
    Delta,
    Gamma0,
    Gamma1,
    /// Both dissipation strengths at once.
    Gamma,
    T0,
    T1,
    /// Drive frequency; rescales the period and keeps the `T_0/T` split.
    Omega,
    /// Fraction of the period spent in segment 0; keeps the period.
    T0Fraction,
}

impl ProtocolField {
    pub const ALL: [ProtocolField; 10] = [
        ProtocolField::Delta0,
        ProtocolField::Delta1,
        ProtocolField::Delta,
        ProtocolField::Gamma0,
        ProtocolField::Gamma1,
        ProtocolField::Gamma,
        ProtocolField::T0,
        ProtocolField::T1,
        ProtocolField::Omega,
        ProtocolField::T0Fraction,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            ProtocolField::Delta0 => "delta0",
            ProtocolField::Delta1 => "delta1",
            ProtocolField::Delta => "delta",
            ProtocolField::Gamma0 => "gamma0",
            ProtocolField::Gamma1 => "gamma1",
            ProtocolField::Gamma => "gamma",
            ProtocolField::T0 => "t0",
            ProtocolField::T1 => "t1",
            ProtocolField::Omega => "omega",
            ProtocolField::T0Fraction => "t0_fraction",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|f| f.name() == name)
    }

    /// Raw fields touched when this selector is written.
    fn footprint(&self) -> &'static [&'static str] {
        match self {
            ProtocolField::Delta0 => &["delta0"],
            ProtocolField::Delta1 => &["delta1"],
            ProtocolField::Delta => &["delta0", "delta1"],
            ProtocolField::Gamma0 => &["gamma0"],
            ProtocolField::Gamma1 => &["gamma1"],
            ProtocolField::Gamma => &["gamma0", "gamma1"],
            ProtocolField::T0 => &["t0"],
            ProtocolField::T1 => &["t1"],
            ProtocolField::Omega | ProtocolField::T0Fraction => &["t0", "t1"],
        }
    }

    // Durations are written after couplings; frequency and split come last so
    // they see the final durations.
    fn order(&self) -> u8 {
        match self {
            ProtocolField::T0 | ProtocolField::T1 => 1,
            ProtocolField::T0Fraction => 2,
            ProtocolField::Omega => 3,
            _ => 0,
        }
    }
}

/// `field ← scale·x + offset`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AxisTerm {
    pub field: ProtocolField,
    pub scale: f64,
    pub offset: f64,
}

impl AxisTerm {
    pub fn new(field: ProtocolField, scale: f64, offset: f64) -> Self {
        Self {
            field,
            scale,
            offset,
        }
    }
}

/// An affine map from one coordinate into one or more protocol fields.
#[derive(Debug, Clone, PartialEq)]
pub struct AxisMap {
    pub terms: Vec<AxisTerm>,
}

impl AxisMap {
    /// `field ← x`.
    pub fn single(field: ProtocolField) -> Self {
        Self {
            terms: vec![AxisTerm::new(field, 1.0, 0.0)],
        }
    }

    pub fn new(terms: Vec<AxisTerm>) -> Self {
        Self { terms }
    }

    pub fn with(mut self, field: ProtocolField, scale: f64, offset: f64) -> Self {
        self.terms.push(AxisTerm::new(field, scale, offset));
        self
    }

    fn footprint(&self) -> Vec<&'static str> {
        let mut out: Vec<&'static str> = self
            .terms
            .iter()
            .flat_map(|t| t.field.footprint().iter().copied())
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Writes `x` into a copy of `base`.
    pub fn apply(&self, base: &DriveProtocol, x: f64) -> Result<DriveProtocol, DriveError> {
        apply_terms(
            base,
            self.terms.iter().map(|t| (t.field, t.scale * x + t.offset)),
        )
    }
}

fn apply_terms(
    base: &DriveProtocol,
    values: impl Iterator<Item = (ProtocolField, f64)>,
) -> Result<DriveProtocol, DriveError> {
    let mut values: Vec<(ProtocolField, f64)> = values.collect();
    values.sort_by_key(|(f, _)| f.order());
    let [mut s0, mut s1] = base.segments();
    for (field, v) in values {
        match field {
            ProtocolField::Delta0 => s0.delta = v,
            ProtocolField::Delta1 => s1.delta = v,
            ProtocolField::Delta => {
                s0.delta = v;
                s1.delta = v;
            }
            ProtocolField::Gamma0 => s0.gamma = v,
            ProtocolField::Gamma1 => s1.gamma = v,
            ProtocolField::Gamma => {
                s0.gamma = v;
                s1.gamma = v;
            }
            ProtocolField::T0 => s0.duration = v,
            ProtocolField::T1 => s1.duration = v,
            ProtocolField::T0Fraction => {
                let period = s0.duration + s1.duration;
                s0.duration = v * period;
                s1.duration = (1.0 - v) * period;
            }
            ProtocolField::Omega => {
                if v.is_nan() || v <= 0.0 {
                    return Err(DriveError::Invalid(format!(
                        "omega must be positive, got {v}"
                    )));
                }
                let fraction = s0.duration / (s0.duration + s1.duration);
                let period = 2.0 * PI / v;
                s0.duration = fraction * period;
                s1.duration = (1.0 - fraction) * period;
            }
        }
    }
    DriveProtocol::new(
        SegmentParams::new(s0.delta, s0.gamma, s0.duration),
        SegmentParams::new(s1.delta, s1.gamma, s1.duration),
    )
}

/// A one-parameter family of protocols.
#[derive(Debug, Clone, PartialEq)]
pub struct ParamRay {
    pub base: DriveProtocol,
    pub axis: AxisMap,
}

impl ParamRay {
    pub fn new(base: DriveProtocol, axis: AxisMap) -> Self {
        Self { base, axis }
    }

    pub fn at(&self, x: f64) -> Result<DriveProtocol, DriveError> {
        self.axis.apply(&self.base, x)
    }

    pub fn pi_at(&self, x: f64) -> Result<f64, AnalysisError> {
        let pi_value = pi_closed_form(&self.at(x)?);
        if pi_value.is_finite() {
            Ok(pi_value)
        } else {
            Err(AnalysisError::NonFinite(x))
        }
    }
}

// ---------------------------------------------------------------------------
// Exceptional points

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EpBoundary {
    /// `Π = +1`, quasi-energy 0.
    PlusOne,
    /// `Π = −1`, quasi-energy `ω/2`.
    MinusOne,
}

impl EpBoundary {
    pub fn target(&self) -> f64 {
        match self {
            EpBoundary::PlusOne => 1.0,
            EpBoundary::MinusOne => -1.0,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            EpBoundary::PlusOne => "PlusOne",
            EpBoundary::MinusOne => "MinusOne",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpLocation {
    pub ray_parameter: f64,
    pub pi_at_root: f64,
    pub boundary: EpBoundary,
    /// `|Π − (±1)|` at the returned point.
    pub residual: f64,
    pub iterations: usize,
}

/// Locates `Π(x) = ±1` on `ray` inside `bracket` by bisection, with one
/// secant step per iteration when it lands strictly inside the bracket.
pub fn find_ep(
    ray: &ParamRay,
    boundary: EpBoundary,
    bracket: (f64, f64),
    root_tol: f64,
) -> Result<EpLocation, AnalysisError> {
    if root_tol.is_nan() || root_tol <= 0.0 {
        return Err(AnalysisError::InvalidRay(format!(
            "root_tol must be positive, got {root_tol}"
        )));
    }
    let target = boundary.target();
    let g = |x: f64| ray.pi_at(x).map(|pi| pi - target);

    let (mut a, mut b) = if bracket.0 <= bracket.1 {
        bracket
    } else {
        (bracket.1, bracket.0)
    };
    let (mut ga, mut gb) = (g(a)?, g(b)?);
    let done = |x: f64, gx: f64, iterations: usize| EpLocation {
        ray_parameter: x,
        pi_at_root: gx + target,
        boundary,
        residual: gx.abs(),
        iterations,
    };
    if ga.abs() <= root_tol {
        return Ok(done(a, ga, 0));
    }
    if gb.abs() <= root_tol {
        return Ok(done(b, gb, 0));
    }
    if ga.signum() == gb.signum() {
        return Err(AnalysisError::NoSignChange { g_a: ga, g_b: gb });
    }

    let mut best = if ga.abs() < gb.abs() {
        (a, ga)
    } else {
        (b, gb)
    };
    for iter in 1..=MAX_ROOT_ITERATIONS {
        let mid = 0.5 * (a + b);
        let gm = g(mid)?;
        if gm.abs() < best.1.abs() {
            best = (mid, gm);
        }
        if gm.abs() <= root_tol {
            return Ok(done(mid, gm, iter));
        }
        if gm.signum() == ga.signum() {
            a = mid;
            ga = gm;
        } else {
            b = mid;
            gb = gm;
        }

        let secant = a - ga * (b - a) / (gb - ga);
        if secant > a && secant < b {
            let gs = g(secant)?;
            if gs.abs() < best.1.abs() {
                best = (secant, gs);
            }
            if gs.abs() <= root_tol {
                return Ok(done(secant, gs, iter));
            }
            if gs.signum() == ga.signum() {
                a = secant;
                ga = gs;
            } else {
                b = secant;
                gb = gs;
            }
        }

        if b - a <= BRACKET_WIDTH_TOL {
            return Ok(done(best.0, best.1, iter));
        }
    }
    Ok(done(best.0, best.1, MAX_ROOT_ITERATIONS))
}

/// Π sampled at `count` evenly spaced points of `[a, b]`.
pub fn scan_ray(
    ray: &ParamRay,
    a: f64,
    b: f64,
    count: usize,
) -> Result<Vec<(f64, f64)>, AnalysisError> {
    if count < 2 {
        return Err(AnalysisError::InvalidRay(
            "scan needs at least two points".into(),
        ));
    }
    (0..count)
        .map(|i| {
            let x = lerp(a, b, i, count);
            ray.pi_at(x).map(|pi| (x, pi))
        })
        .collect()
}

/// Neighbouring scan points between which `Π ∓ 1` changes sign.
pub fn sign_change_brackets(scan: &[(f64, f64)], boundary: EpBoundary) -> Vec<(f64, f64)> {
    let target = boundary.target();
    scan.windows(2)
        .filter(|w| (w[0].1 - target).signum() != (w[1].1 - target).signum())
        .map(|w| (w[0].0, w[1].0))
        .collect()
}

/// Every exceptional point on `[a, b]` that a scan of `count` points can bracket.
pub fn find_all_eps(
    ray: &ParamRay,
    boundary: EpBoundary,
    range: (f64, f64),
    count: usize,
    root_tol: f64,
) -> Result<Vec<EpLocation>, AnalysisError> {
    let scan = scan_ray(ray, range.0, range.1, count)?;
    sign_change_brackets(&scan, boundary)
        .into_iter()
        .map(|br| find_ep(ray, boundary, br, root_tol))
        .collect()
}

// ---------------------------------------------------------------------------
// Multiphoton resonances

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PhotonParity {
    OddPhoton,
    EvenPhoton,
}

/// Why weak dissipation is (or is not) expected to break PT symmetry at a resonance.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ResonanceReason {
    /// `Π = −1` at zero dissipation; any perturbation can push it below −1.
    Odd,
    GammaImbalance,
    DurationImbalance,
    BothImbalanced,
    /// `γ0 = −γ1` and `T0 = T1`: the two segments have equal `h_jT_j`.
    Balanced,
}

impl ResonanceReason {
    pub fn code(&self) -> &'static str {
        match self {
            ResonanceReason::Odd => "odd",
            ResonanceReason::GammaImbalance => "gamma_imbalance",
            ResonanceReason::DurationImbalance => "duration_imbalance",
            ResonanceReason::BothImbalanced => "both_imbalanced",
            ResonanceReason::Balanced => "balanced",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResonancePrediction {
    pub k: u32,
    pub kind: PhotonParity,
    /// `|Δ_eff| / k`.
    pub omega_resonant: f64,
    pub breaking_expected: bool,
    pub reason: ResonanceReason,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResonanceTable {
    pub delta_eff: f64,
    /// Set when `Δ_eff = 0`; the table is then empty.
    pub no_effective_coupling: bool,
    pub predictions: Vec<ResonancePrediction>,
}

/// Resonances `Δ_eff = kω` for `k = 1..=k_max`. Only the `T_0/T` split of `p`
/// matters; the frequency it carries is ignored.
pub fn predict_resonances(p: &DriveProtocol, k_max: u32) -> ResonanceTable {
    let delta_eff = p.derived().delta_eff;
    if delta_eff == 0.0 || k_max == 0 {
        return ResonanceTable {
            delta_eff,
            no_effective_coupling: delta_eff == 0.0,
            predictions: Vec::new(),
        };
    }
    let [s0, s1] = p.segments();
    let gamma_balanced = (s0.gamma + s1.gamma).abs() <= BALANCE_TOL;
    let duration_balanced = ((s0.duration - s1.duration) / p.period()).abs() <= BALANCE_TOL;
    let even_reason = match (gamma_balanced, duration_balanced) {
        (true, true) => ResonanceReason::Balanced,
        (false, true) => ResonanceReason::GammaImbalance,
        (true, false) => ResonanceReason::DurationImbalance,
        (false, false) => ResonanceReason::BothImbalanced,
    };
    let predictions = (1..=k_max)
        .map(|k| {
            let (kind, reason) = if k % 2 == 1 {
                (PhotonParity::OddPhoton, ResonanceReason::Odd)
            } else {
                (PhotonParity::EvenPhoton, even_reason)
            };
            ResonancePrediction {
                k,
                kind,
                omega_resonant: delta_eff.abs() / f64::from(k),
                breaking_expected: reason != ResonanceReason::Balanced,
                reason,
            }
        })
        .collect();
    ResonanceTable {
        delta_eff,
        no_effective_coupling: false,
        predictions,
    }
}

// ---------------------------------------------------------------------------
// High-frequency limit

/// Second-order expansion `Π ≈ 1 + (γ_eff² − Δ_eff²) T² / 8`.
pub fn hf_pi_approx(p: &DriveProtocol) -> f64 {
    let d = p.derived();
    1.0 + (d.gamma_eff * d.gamma_eff - d.delta_eff * d.delta_eff) * d.period * d.period / 8.0
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HfBoundary {
    /// The boundary sits at `γ_eff = ±gamma_eff_boundary`, i.e. `±|Δ_eff|`.
    pub gamma_eff_boundary: f64,
    pub delta_eff: f64,
    pub gamma_eff: f64,
    /// `|γ_eff| < |Δ_eff|` → symmetric, `>` → broken with `n = 0`, equal → EP.
    pub predicted: PhaseVariant,
}

pub fn hf_boundary(p: &DriveProtocol) -> HfBoundary {
    let d = p.derived();
    let (g, dl) = (d.gamma_eff.abs(), d.delta_eff.abs());
    let predicted = if g < dl {
        PhaseVariant::PTSymmetric
    } else if g > dl {
        PhaseVariant::BrokenN0
    } else {
        PhaseVariant::ExceptionalPoint
    };
    HfBoundary {
        gamma_eff_boundary: dl,
        delta_eff: d.delta_eff,
        gamma_eff: d.gamma_eff,
        predicted,
    }
}

/// Leading-order effective Hamiltonian: a static system with the
/// time-averaged coupling and dissipation.
pub fn hf_effective_hamiltonian(p: &DriveProtocol) -> EffectiveHamiltonian {
    let d = p.derived();
    EffectiveHamiltonian {
        j: d.delta_eff,
        gamma_y: 0.0,
        gamma_z: d.gamma_eff,
        n: 0,
        well_conditioned: true,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HfComparison {
    pub period: f64,
    pub exact: f64,
    pub approx: f64,
    pub abs_diff: f64,
}

/// Exact and second-order Π for `p` and `levels − 1` successive halvings of
/// both durations.
pub fn hf_convergence(p: &DriveProtocol, levels: usize) -> Result<Vec<HfComparison>, DriveError> {
    let mut out = Vec::with_capacity(levels);
    let mut current = *p;
    for _ in 0..levels {
        let exact = pi_closed_form(&current);
        let approx = hf_pi_approx(&current);
        out.push(HfComparison {
            period: current.period(),
            exact,
            approx,
            abs_diff: (exact - approx).abs(),
        });
        let [s0, s1] = current.segments();
        current = DriveProtocol::new(
            SegmentParams::new(s0.delta, s0.gamma, s0.duration / 2.0),
            SegmentParams::new(s1.delta, s1.gamma, s1.duration / 2.0),
        )?;
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Sweeps

#[derive(Debug, Clone, PartialEq)]
pub struct SweepAxis {
    pub name: String,
    pub map: AxisMap,
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

impl SweepAxis {
    pub fn new(name: impl Into<String>, map: AxisMap, min: f64, max: f64, count: usize) -> Self {
        Self {
            name: name.into(),
            map,
            min,
            max,
            count,
        }
    }

    pub fn value(&self, i: usize) -> f64 {
        lerp(self.min, self.max, i, self.count)
    }
}

fn lerp(a: f64, b: f64, i: usize, count: usize) -> f64 {
    if i + 1 == count {
        b
    } else {
        a + (b - a) * i as f64 / (count - 1) as f64
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepGrid {
    pub x: SweepAxis,
    pub y: SweepAxis,
    pub base: DriveProtocol,
    pub ep_tol: f64,
}

impl SweepGrid {
    pub fn new(
        x: SweepAxis,
        y: SweepAxis,
        base: DriveProtocol,
        ep_tol: f64,
    ) -> Result<Self, AnalysisError> {
        for axis in [&x, &y] {
            if axis.count < 2 {
                return Err(AnalysisError::InvalidGrid(format!(
                    "axis `{}` needs at least 2 points",
                    axis.name
                )));
            }
            if !(axis.min.is_finite() && axis.max.is_finite()) {
                return Err(AnalysisError::InvalidGrid(format!(
                    "axis `{}` has a non-finite range",
                    axis.name
                )));
            }
            if axis.map.terms.is_empty() {
                return Err(AnalysisError::InvalidGrid(format!(
                    "axis `{}` drives no parameter",
                    axis.name
                )));
            }
        }
        let fx = x.map.footprint();
        if let Some(shared) = y.map.footprint().into_iter().find(|f| fx.contains(f)) {
            return Err(AnalysisError::InvalidGrid(format!(
                "both axes drive `{shared}`"
            )));
        }
        if ep_tol.is_nan() || ep_tol <= 0.0 {
            return Err(AnalysisError::InvalidGrid(format!(
                "ep_tol must be positive, got {ep_tol}"
            )));
        }
        Ok(Self { x, y, base, ep_tol })
    }

    pub fn len(&self) -> usize {
        self.x.count * self.y.count
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn protocol_at(&self, x: f64, y: f64) -> Result<DriveProtocol, DriveError> {
        apply_terms(
            &self.base,
            self.x
                .map
                .terms
                .iter()
                .map(|t| (t.field, t.scale * x + t.offset))
                .chain(
                    self.y
                        .map
                        .terms
                        .iter()
                        .map(|t| (t.field, t.scale * y + t.offset)),
                ),
        )
    }

    fn evaluate(&self, index: usize) -> SweepRecord {
        let (ix, iy) = (index % self.x.count, index / self.x.count);
        let (x, y) = (self.x.value(ix), self.y.value(iy));
        let invalid = SweepRecord {
            x,
            y,
            pi_value: f64::NAN,
            label: None,
            re_quasi: f64::NAN,
            im_quasi: f64::NAN,
        };
        let Ok(p) = self.protocol_at(x, y) else {
            return invalid;
        };
        let pi_value = pi_closed_form(&p);
        if !pi_value.is_finite() {
            return SweepRecord {
                pi_value,
                ..invalid
            };
        }
        let q = quasi_energies_with_tol(pi_value, p.omega(), self.ep_tol);
        SweepRecord {
            x,
            y,
            pi_value,
            label: Some(q.label),
            re_quasi: q.e_plus.re,
            im_quasi: q.e_plus.im.abs(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRecord {
    pub x: f64,
    pub y: f64,
    pub pi_value: f64,
    /// `None` when the point has no valid protocol or a non-finite Π.
    pub label: Option<PhaseLabel>,
    /// `Re E₊`.
    pub re_quasi: f64,
    /// `|Im E₊|`.
    pub im_quasi: f64,
}

impl SweepRecord {
    pub fn variant(&self) -> Option<PhaseVariant> {
        self.label.map(|l| l.variant)
    }
}

/// Evaluates every grid point, in parallel on the global rayon pool.
/// Records come back row-major with `y` outer.
pub fn sweep(grid: &SweepGrid) -> Vec<SweepRecord> {
    (0..grid.len())
        .into_par_iter()
        .map(|i| grid.evaluate(i))
        .collect()
}

/// [`sweep`] on a dedicated pool of `threads` workers (`0` = rayon default).
pub fn sweep_with_threads(grid: &SweepGrid, threads: usize) -> Vec<SweepRecord> {
    if threads == 0 {
        return sweep(grid);
    }
    match rayon::ThreadPoolBuilder::new().num_threads(threads).build() {
        Ok(pool) => pool.install(|| sweep(grid)),
        Err(_) => sweep(grid),
    }
}

/// 4-connected components of grid cells whose label satisfies `pred`.
/// Each component is a list of `(ix, iy)` cells.
pub fn connected_regions<F>(
    records: &[SweepRecord],
    nx: usize,
    ny: usize,
    pred: F,
) -> Vec<Vec<(usize, usize)>>
where
    F: Fn(&SweepRecord) -> bool,
{
    assert_eq!(
        records.len(),
        nx * ny,
        "record count does not match grid shape"
    );
    let mut seen = vec![false; records.len()];
    let mut regions = Vec::new();
    for start in 0..records.len() {
        if seen[start] || !pred(&records[start]) {
            continue;
        }
        let mut cells = Vec::new();
        let mut queue = VecDeque::from([start]);
        seen[start] = true;
        while let Some(idx) = queue.pop_front() {
            let (ix, iy) = (idx % nx, idx / nx);
            cells.push((ix, iy));
            let mut neighbours = Vec::with_capacity(4);
            if ix > 0 {
                neighbours.push(idx - 1);
            }
            if ix + 1 < nx {
                neighbours.push(idx + 1);
            }
            if iy > 0 {
                neighbours.push(idx - nx);
            }
            if iy + 1 < ny {
                neighbours.push(idx + nx);
            }
            for nb in neighbours {
                if !seen[nb] && pred(&records[nb]) {
                    seen[nb] = true;
                    queue.push_back(nb);
                }
            }
        }
        regions.push(cells);
    }
    regions
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSummary {
    pub nx: usize,
    pub ny: usize,
    pub symmetric_points: usize,
    pub broken_n0_points: usize,
    pub broken_n1_points: usize,
    pub exceptional_points: usize,
    pub invalid_points: usize,
    pub broken_n0_lobes: usize,
    pub broken_n1_lobes: usize,
    /// Number of label changes along `x` in each row, bottom row first.
    pub row_crossings: Vec<usize>,
}

pub fn summarize(records: &[SweepRecord], nx: usize, ny: usize) -> SweepSummary {
    let count = |v: Option<PhaseVariant>| records.iter().filter(|r| r.variant() == v).count();
    let lobes =
        |v: PhaseVariant| connected_regions(records, nx, ny, |r| r.variant() == Some(v)).len();
    let row_crossings = records
        .chunks(nx)
        .map(|row| {
            row.windows(2)
                .filter(|w| w[0].variant() != w[1].variant())
                .count()
        })
        .collect();
    SweepSummary {
        nx,
        ny,
        symmetric_points: count(Some(PhaseVariant::PTSymmetric)),
        broken_n0_points: count(Some(PhaseVariant::BrokenN0)),
        broken_n1_points: count(Some(PhaseVariant::BrokenN1)),
        exceptional_points: count(Some(PhaseVariant::ExceptionalPoint)),
        invalid_points: count(None),
        broken_n0_lobes: lobes(PhaseVariant::BrokenN0),
        broken_n1_lobes: lobes(PhaseVariant::BrokenN1),
        row_crossings,
    }
}

/// Classification of a single protocol with the default tolerance.
pub fn phase_of(p: &DriveProtocol) -> PhaseLabel {
    classify(pi_closed_form(p), DEFAULT_EP_TOL)
}
