//! Tracing spectral points along paths of the coupling parameter.
//!
//! A [`CouplingModel`] turns `V0 + z·V1` into the miss function `m(λ; z)`.
//! [`trace`] follows one zero of `m` as `z` runs along a polygonal
//! [`PathSpec`], classifying every accepted point and recording class
//! changes, collisions of two branches, and escapes to infinity.
//! [`scan_real_well`] sweeps the depth of the real square well and reports
//! where resonance pairs collide and where eigenvalues are born at `κ = 0`.

mod model;
mod scan;
mod tracer;

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use num_complex::Complex64;
#[allow(unused_imports)] // inherent float methods need std
use num_traits::Float;
use thiserror::Error;

use crate::rootfind::{RootConfig, RootError};
use crate::shooting::ShootError;
use crate::stepwell::StepwellError;
use crate::{is_finite, kappa_of};

pub use model::{CouplingModel, FreeCoupling};
pub use scan::{scan_real_well, ScanEvent, ScanEventKind, ScanLog, ScanSample};
pub use tracer::{branch_collision, kappa_rate, trace};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SpectralClass {
    Eigenvalue,
    /// Resonance on the negative real λ-axis.
    Antibound,
    Resonance,
    SpectralSingularity,
}

impl SpectralClass {
    pub fn as_str(self) -> &'static str {
        match self {
            SpectralClass::Eigenvalue => "eigenvalue",
            SpectralClass::Antibound => "antibound",
            SpectralClass::Resonance => "resonance",
            SpectralClass::SpectralSingularity => "spectral_singularity",
        }
    }

    /// Antibound states are resonances too.
    pub fn is_resonance(self) -> bool {
        matches!(self, SpectralClass::Resonance | SpectralClass::Antibound)
    }
}

impl fmt::Display for SpectralClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Class of the spectral point `κ = −λ²`; `band` is the half-width of the
/// strip around `Re λ = 0` (and around `Im λ = 0` for antibound states).
pub fn classify(lambda: Complex64, band: f64) -> SpectralClass {
    if lambda.re > band {
        SpectralClass::Eigenvalue
    } else if lambda.re < -band {
        if lambda.im.abs() <= band {
            SpectralClass::Antibound
        } else {
            SpectralClass::Resonance
        }
    } else {
        SpectralClass::SpectralSingularity
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceConfig {
    /// Half-width of the spectral-singularity strip on `Re λ`.
    pub band: f64,
    pub newton_tol: f64,
    /// `|∂m/∂λ|` below this marks a non-simple point.
    pub collision_threshold: f64,
    pub max_step_halvings: u32,
    pub divergence_radius: f64,
}

impl Default for TraceConfig {
    fn default() -> Self {
        Self {
            band: 1e-8,
            newton_tol: 1e-12,
            collision_threshold: 1e-6,
            max_step_halvings: 20,
            divergence_radius: 1e3,
        }
    }
}

impl TraceConfig {
    pub fn validate(&self) -> Result<(), TraceError> {
        let ok = self.band > 0.0
            && self.newton_tol > 0.0
            && self.collision_threshold > 0.0
            && self.max_step_halvings > 0
            && self.divergence_radius > 0.0;
        if ok {
            Ok(())
        } else {
            Err(TraceError::InvalidConfig)
        }
    }

    pub fn root_config(&self) -> RootConfig {
        RootConfig {
            newton_tol: self.newton_tol,
            ..RootConfig::default()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum TraceError {
    #[error("seed is not a zero of the miss function (|m| = {residual:e} after polishing)")]
    SeedNotRoot { residual: f64 },
    #[error("the potential vanishes identically at z = {z}, which lies on the path")]
    FreeOperatorOnPath { z: Complex64 },
    #[error("step size collapsed at t = {t}, z = {z}, λ = {lambda}")]
    StepCollapse {
        t: f64,
        z: Complex64,
        lambda: Complex64,
    },
    #[error("V0 and V1 must have the same kind and support")]
    ModelMismatch,
    #[error("path needs finite vertices, distinct consecutive vertices and steps_per_edge ≥ 1")]
    InvalidPath,
    #[error("trace configuration fields must be positive")]
    InvalidConfig,
    #[error("λ is not a zero of the miss function (|m| = {residual:e})")]
    NotARoot { residual: f64 },
    #[error("λ is not a simple zero (|∂m/∂λ| = {derivative:e})")]
    NotSimple { derivative: f64 },
    #[error("(z, λ) is not a double zero (|m| = {residual:e}, |∂m/∂λ| = {derivative:e})")]
    NotDoubleRoot { residual: f64, derivative: f64 },
    #[error("local quadratic model degenerate (|α| = {alpha:e}, |β| = {beta:e})")]
    DegenerateModel { alpha: f64, beta: f64 },
    #[error("norm integral needs |λ| ≥ 1e-12")]
    ZeroLambda,
    #[error("scan range must exclude the free well v = 0 and hold at least two samples")]
    InvalidScan,
    #[error(transparent)]
    Root(#[from] RootError),
    #[error(transparent)]
    Shoot(#[from] ShootError),
    #[error(transparent)]
    Stepwell(#[from] StepwellError),
}

/// Polygonal path of the coupling `z`.
///
/// The parameter `t ∈ [0, 1]` is split evenly between edges.
#[derive(Debug, Clone, PartialEq)]
pub struct PathSpec {
    vertices: Vec<Complex64>,
    steps_per_edge: usize,
}

impl PathSpec {
    pub const DEFAULT_STEPS_PER_EDGE: usize = 200;

    pub fn new(vertices: Vec<Complex64>, steps_per_edge: usize) -> Result<Self, TraceError> {
        if vertices.is_empty() || steps_per_edge == 0 || !vertices.iter().all(|v| is_finite(*v)) {
            return Err(TraceError::InvalidPath);
        }
        if vertices.windows(2).any(|w| w[0] == w[1]) {
            return Err(TraceError::InvalidPath);
        }
        Ok(Self {
            vertices,
            steps_per_edge,
        })
    }

    pub fn vertices(&self) -> &[Complex64] {
        &self.vertices
    }

    pub fn steps_per_edge(&self) -> usize {
        self.steps_per_edge
    }

    pub fn edges(&self) -> usize {
        self.vertices.len() - 1
    }

    pub fn is_point(&self) -> bool {
        self.vertices.len() == 1
    }

    /// `z(t)`, exact at vertices.
    pub fn point(&self, t: f64) -> Complex64 {
        let e = self.edges();
        if e == 0 || t <= 0.0 {
            return self.vertices[0];
        }
        if t >= 1.0 {
            return self.vertices[e];
        }
        let scaled = t * e as f64;
        let k = (scaled.floor() as usize).min(e - 1);
        let s = scaled - k as f64;
        if s == 0.0 {
            return self.vertices[k];
        }
        self.vertices[k] + (self.vertices[k + 1] - self.vertices[k]) * s
    }

    pub fn reversed(&self) -> Self {
        let mut vertices = self.vertices.clone();
        vertices.reverse();
        Self {
            vertices,
            steps_per_edge: self.steps_per_edge,
        }
    }

    pub fn conj(&self) -> Self {
        Self {
            vertices: self.vertices.iter().map(|v| v.conj()).collect(),
            steps_per_edge: self.steps_per_edge,
        }
    }

    /// Whether `z` lies on the path within `tol`.
    pub fn passes_through(&self, z: Complex64, tol: f64) -> bool {
        if self.is_point() {
            return (self.vertices[0] - z).norm() <= tol;
        }
        self.vertices
            .windows(2)
            .any(|w| distance_to_segment(z, w[0], w[1]) <= tol)
    }
}

pub(crate) fn distance_to_segment(z: Complex64, a: Complex64, b: Complex64) -> f64 {
    let d = b - a;
    let len2 = d.norm_sqr();
    if len2 == 0.0 {
        return (z - a).norm();
    }
    let s = ((z - a) * d.conj()).re / len2;
    let s = s.clamp(0.0, 1.0);
    (z - (a + d * s)).norm()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectoryPoint {
    pub t: f64,
    pub z: Complex64,
    pub lambda: Complex64,
    pub class: SpectralClass,
}

impl TrajectoryPoint {
    pub fn kappa(&self) -> Complex64 {
        kappa_of(self.lambda)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EventKind {
    ClassChange,
    Collision,
    Terminated,
    Diverged,
}

impl EventKind {
    pub fn as_str(self) -> &'static str {
        match self {
            EventKind::ClassChange => "ClassChange",
            EventKind::Collision => "Collision",
            EventKind::Terminated => "Terminated",
            EventKind::Diverged => "Diverged",
        }
    }
}

impl fmt::Display for EventKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Double zero met on the path and the two outgoing branches.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CollisionRecord {
    pub z: Complex64,
    pub lambda: Complex64,
    pub branches: [Complex64; 2],
    /// Index into `branches` of the branch the trace continued on.
    pub chosen: usize,
    /// `∫φ²` at the double zero, when `λ ≠ 0`.
    pub norm_integral: Option<Complex64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TraceEvent {
    pub t: f64,
    pub kind: EventKind,
    pub detail: String,
    pub collision: Option<CollisionRecord>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Trajectory {
    pub points: Vec<TrajectoryPoint>,
    pub events: Vec<TraceEvent>,
}

impl Trajectory {
    pub fn last(&self) -> Option<&TrajectoryPoint> {
        self.points.last()
    }

    pub fn events_of(&self, kind: EventKind) -> impl Iterator<Item = &TraceEvent> {
        self.events.iter().filter(move |e| e.kind == kind)
    }
}
