#![allow(dead_code)]

use floquet_pt::{DriveProtocol, SegmentParams};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// |Δ|, |γ| ≤ `amp`, durations in `[t_min, t_max]`.
pub fn random_protocol(rng: &mut ChaCha8Rng, amp: f64, t_min: f64, t_max: f64) -> DriveProtocol {
    let mut seg = || {
        SegmentParams::new(
            rng.gen_range(-amp..=amp),
            rng.gen_range(-amp..=amp),
            rng.gen_range(t_min..=t_max),
        )
    };
    let (s0, s1) = (seg(), seg());
    DriveProtocol::new(s0, s1).unwrap()
}

pub fn proto(d0: f64, d1: f64, g0: f64, g1: f64, t0: f64, t1: f64) -> DriveProtocol {
    DriveProtocol::new(
        SegmentParams::new(d0, g0, t0),
        SegmentParams::new(d1, g1, t1),
    )
    .unwrap()
}

pub fn at_frequency(
    omega: f64,
    t0_fraction: f64,
    delta: (f64, f64),
    gamma: (f64, f64),
) -> DriveProtocol {
    DriveProtocol::from_frequency(omega, t0_fraction, delta, gamma).unwrap()
}

/// Δ0 = Δ1 = 1, T0 = T1, γ0 = γ, γ1 = 0.
pub fn one_sided(omega: f64, gamma: f64) -> DriveProtocol {
    at_frequency(omega, 0.5, (1.0, 1.0), (gamma, 0.0))
}

/// Largest element deviation relative to `max(1, ‖reference‖)`.
pub fn rel_diff(a: &floquet_pt::Mat2, reference: &floquet_pt::Mat2) -> f64 {
    a.max_elem_diff(reference) / reference.norm().max(1.0)
}
