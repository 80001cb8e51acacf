//! Discrete spectrum of half-line Schrödinger operators
//! `H(z) = -d²/dx² + V0 + z·V1` with compactly supported complex potentials.
//!
//! Everything is expressed in the `λ`-plane, where `κ = -λ²` is the spectral
//! parameter. A spectral point is a zero of the entire miss function
//! `m(λ) = φ'(a) + λ·φ(a)`, with `φ` the interior solution satisfying
//! `φ(0) = 0`, `φ'(0) = 1`. The sign of `Re λ` separates eigenvalues
//! (`Re λ > 0`), spectral singularities (`Re λ = 0`) and resonances (`Re λ < 0`).
//!
//! Modules:
//!
//! - [`rootfind`]: Newton refinement, argument-principle counting and
//!   subdivision seeding for entire functions.
//! - [`stepwell`]: closed forms for piecewise-constant potentials.
//! - [`shooting`]: RK4 shooting with λ-variational equations for sampled potentials.
//! - [`continuation`]: classification, path tracing, collisions and real-well scans.
//! - [`counting`]: `tan θ = θ` thresholds, exact counts for the unit square well, bounds.
//!
//! The crate is `no_std` and only needs `alloc`.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod analytic;
pub mod continuation;
pub mod counting;
pub mod rootfind;
pub mod shooting;
pub mod stepwell;

pub use num_complex::Complex64;

pub use continuation::{
    branch_collision, classify, kappa_rate, scan_real_well, trace, CollisionRecord, CouplingModel,
    EventKind, FreeCoupling, PathSpec, ScanEvent, ScanEventKind, ScanLog, ScanSample,
    SpectralClass, TraceConfig, TraceError, TraceEvent, Trajectory, TrajectoryPoint,
};
pub use counting::{
    antibound_count_exact, bounds_report, eigenvalue_count_exact, frank_constant, tan_theta_root,
    well_counts, AntiboundCount, BoundsReport, WellCounts,
};
pub use rootfind::{
    newton_refine, seed_roots, winding_count, AnalyticFn, Region, RootConfig, RootEntry,
    RootError, RootStatus,
};
pub use shooting::{
    integrate_phi, integrate_phi_from, miss_sampled, norm_integral_sampled, SampledPotential, ShootError, ShotResult,
};
pub use stepwell::{
    char_fn, even_pair, miss_piecewise, norm_integral_step, transfer_step, EvenPair, Segment,
    StepPotential, StepwellError, TransferMatrix,
};

/// `κ = -λ²`.
#[inline]
pub fn kappa_of(lambda: Complex64) -> Complex64 {
    -(lambda * lambda)
}

/// True when both components are finite.
#[inline]
pub fn is_finite(z: Complex64) -> bool {
    z.re.is_finite() && z.im.is_finite()
}
