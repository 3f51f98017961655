//! Exact Floquet analysis of a two-level system whose coupling `Δ(t)` and
//! gain/loss `γ(t)` follow a two-level square wave:
//!
//! ```text
//! H(t) = Δ(t)/2 σx + i γ(t)/2 σz
//! ```
//!
//! The crate builds the one-period monodromy in closed form, classifies the
//! PT phase from `Π = tr U_eff / 2`, extracts quasi-energies and the effective
//! Hamiltonian, and provides sweeps, exceptional-point search, multiphoton
//! resonance prediction and high-frequency limits on top. [`dynamics`] is an
//! independent brute-force propagator used to cross-check all of it.

pub mod analysis;
pub mod drive;
pub mod dynamics;
pub mod floquet;
pub mod su2;

pub use drive::{DerivedQuantities, DriveError, DriveProtocol, SegmentParams};
pub use floquet::{
    analyze, classify, effective_hamiltonian, monodromy, pi_closed_form, quasi_energies,
    EffectiveHamiltonian, FloquetError, FloquetResult, PhaseLabel, PhaseVariant, QuasiEnergies,
    DEFAULT_EP_TOL,
};
pub use su2::{ComplexScalar, Mat2};
