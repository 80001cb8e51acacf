use alloc::vec::Vec;

use num_complex::Complex64;

use super::TraceError;
use crate::analytic::circle_derivative;
use crate::rootfind::AnalyticFn;
use crate::shooting::{integrate_nodes, SampledPotential};
use crate::stepwell::{miss_segments, segment_square_integrals, Segment, StepPotential};

/// Radius of the circles used for `z`- and second λ-derivatives.
const DERIVATIVE_RADIUS: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq)]
enum Kind {
    /// Common refinement of both step potentials.
    Step {
        lengths: Vec<f64>,
        base: Vec<Complex64>,
        pert: Vec<Complex64>,
    },
    Sampled {
        a: f64,
        base: Vec<Complex64>,
        pert: Vec<Complex64>,
        steps: usize,
    },
}

/// The family `V0 + z·V1` and its miss function `m(λ; z)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CouplingModel {
    kind: Kind,
}

/// Where the family reduces to the free operator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FreeCoupling {
    Never,
    Everywhere,
    At(Complex64),
}

impl CouplingModel {
    pub fn from_steps(v0: &StepPotential, v1: &StepPotential) -> Result<Self, TraceError> {
        let a = v0.support_end();
        if (a - v1.support_end()).abs() > 1e-12 * a {
            return Err(TraceError::ModelMismatch);
        }
        let mut breaks: Vec<f64> = v0.breakpoints();
        breaks.extend(v1.breakpoints());
        breaks.sort_by(|x, y| x.partial_cmp(y).unwrap_or(core::cmp::Ordering::Equal));
        breaks.dedup_by(|x, y| (*x - *y).abs() <= 1e-12 * a);
        // the two support ends may differ by rounding
        if let Some(last) = breaks.last_mut() {
            *last = a;
        }

        let mut lengths = Vec::with_capacity(breaks.len());
        let mut base = Vec::with_capacity(breaks.len());
        let mut pert = Vec::with_capacity(breaks.len());
        let mut left = 0.0;
        for &right in &breaks {
            let mid = 0.5 * (left + right);
            lengths.push(right - left);
            base.push(v0.value_at(mid));
            pert.push(v1.value_at(mid));
            left = right;
        }
        Ok(Self {
            kind: Kind::Step {
                lengths,
                base,
                pert,
            },
        })
    }

    /// `steps` defaults to the smallest grid-aligned count of at least 1000.
    pub fn from_samples(
        v0: &SampledPotential,
        v1: &SampledPotential,
        steps: Option<usize>,
    ) -> Result<Self, TraceError> {
        if v0.len() != v1.len() || v0.support_end() != v1.support_end() {
            return Err(TraceError::ModelMismatch);
        }
        let steps = steps.unwrap_or_else(|| v0.aligned_steps(1000));
        let cells = v0.cells();
        if steps < cells || steps % cells != 0 {
            return Err(crate::shooting::ShootError::GridMismatch { steps, cells }.into());
        }
        Ok(Self {
            kind: Kind::Sampled {
                a: v0.support_end(),
                base: v0.values().to_vec(),
                pert: v1.values().to_vec(),
                steps,
            },
        })
    }

    /// Square well `v0` on `[0, 1]` perturbed by the indicator of `[0, 1]`.
    pub fn unit_well(v0: Complex64) -> Self {
        let one = Complex64::new(1.0, 0.0);
        Self {
            kind: Kind::Step {
                lengths: alloc::vec![1.0],
                base: alloc::vec![v0],
                pert: alloc::vec![one],
            },
        }
    }

    pub fn is_step(&self) -> bool {
        matches!(self.kind, Kind::Step { .. })
    }

    /// `sup |V1|`.
    pub fn perturbation_sup(&self) -> f64 {
        let pert = match &self.kind {
            Kind::Step { pert, .. } | Kind::Sampled { pert, .. } => pert,
        };
        pert.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// `m(λ; z)` and `∂m/∂λ`.
    pub fn miss(&self, lambda: Complex64, z: Complex64) -> (Complex64, Complex64) {
        match &self.kind {
            Kind::Step {
                lengths,
                base,
                pert,
            } => miss_segments(
                lengths
                    .iter()
                    .zip(base.iter().zip(pert.iter()))
                    .map(|(&l, (&b, &p))| Segment::new(l, b + z * p)),
                lambda,
            ),
            Kind::Sampled {
                a,
                base,
                pert,
                steps,
            } => {
                let zero = Complex64::new(0.0, 0.0);
                let one = Complex64::new(1.0, 0.0);
                match integrate_nodes(
                    *a,
                    base.len() - 1,
                    |i| base[i] + z * pert[i],
                    |_| zero,
                    lambda,
                    *steps,
                    (zero, one),
                ) {
                    Ok(r) => {
                        let s = r.shot;
                        (
                            s.dphi_a + lambda * s.phi_a,
                            s.dlam_dphi_a + s.phi_a + lambda * s.dlam_phi_a,
                        )
                    }
                    Err(_) => {
                        let nan = Complex64::new(f64::NAN, f64::NAN);
                        (nan, nan)
                    }
                }
            }
        }
    }

    /// The miss function at fixed `z`.
    pub fn at(&self, z: Complex64) -> impl AnalyticFn + '_ {
        move |lambda: Complex64| self.miss(lambda, z)
    }

    /// `∂m/∂z`.
    pub fn dm_dz(&self, lambda: Complex64, z: Complex64) -> Complex64 {
        circle_derivative(|zz| self.miss(lambda, zz).0, z, DERIVATIVE_RADIUS, 1)
    }

    /// `∂²m/∂λ²`.
    pub fn d2m_dlambda2(&self, lambda: Complex64, z: Complex64) -> Complex64 {
        circle_derivative(|l| self.miss(l, z).1, lambda, DERIVATIVE_RADIUS, 1)
    }

    /// `∂²m/∂λ∂z`.
    pub fn d2m_dlambda_dz(&self, lambda: Complex64, z: Complex64) -> Complex64 {
        circle_derivative(|zz| self.miss(lambda, zz).1, z, DERIVATIVE_RADIUS, 1)
    }

    /// `(∫₀^∞ φ², ∫₀ᵃ V1 φ²)` for the interior solution at `(λ, z)`.
    pub fn norm_integrals(
        &self,
        lambda: Complex64,
        z: Complex64,
    ) -> Result<(Complex64, Complex64), TraceError> {
        if lambda.norm() < 1e-12 {
            return Err(TraceError::ZeroLambda);
        }
        let tail = |phi_a: Complex64| phi_a * phi_a / (lambda * 2.0);
        match &self.kind {
            Kind::Step {
                lengths,
                base,
                pert,
            } => {
                let (pieces, phi_a) = segment_square_integrals(
                    lengths
                        .iter()
                        .zip(base.iter().zip(pert.iter()))
                        .map(|(&l, (&b, &p))| Segment::new(l, b + z * p)),
                    lambda,
                );
                let interior: Complex64 = pieces.iter().sum();
                let weighted: Complex64 = pieces.iter().zip(pert.iter()).map(|(i, p)| i * p).sum();
                Ok((interior + tail(phi_a), weighted))
            }
            Kind::Sampled {
                a,
                base,
                pert,
                steps,
            } => {
                let zero = Complex64::new(0.0, 0.0);
                let one = Complex64::new(1.0, 0.0);
                let r = integrate_nodes(
                    *a,
                    base.len() - 1,
                    |i| base[i] + z * pert[i],
                    |i| pert[i],
                    lambda,
                    *steps,
                    (zero, one),
                )?;
                Ok((r.square + tail(r.shot.phi_a), r.weighted))
            }
        }
    }

    /// Locates `z` with `V0 + z·V1 ≡ 0`.
    pub fn free_coupling(&self) -> FreeCoupling {
        let (base, pert) = match &self.kind {
            Kind::Step { base, pert, .. } | Kind::Sampled { base, pert, .. } => (base, pert),
        };
        let zero = Complex64::new(0.0, 0.0);
        let Some(i) = pert.iter().position(|p| *p != zero) else {
            return if base.iter().all(|b| *b == zero) {
                FreeCoupling::Everywhere
            } else {
                FreeCoupling::Never
            };
        };
        let z = -base[i] / pert[i];
        let scale = base.iter().map(|b| b.norm()).fold(1.0, f64::max);
        let vanishes = base
            .iter()
            .zip(pert.iter())
            .all(|(b, p)| (b + z * p).norm() <= 1e-12 * scale);
        if vanishes {
            FreeCoupling::At(z)
        } else {
            FreeCoupling::Never
        }
    }

    /// The family with every potential value conjugated.
    pub fn conj(&self) -> Self {
        let conj = |v: &Vec<Complex64>| v.iter().map(|x| x.conj()).collect::<Vec<_>>();
        let kind = match &self.kind {
            Kind::Step {
                lengths,
                base,
                pert,
            } => Kind::Step {
                lengths: lengths.clone(),
                base: conj(base),
                pert: conj(pert),
            },
            Kind::Sampled {
                a,
                base,
                pert,
                steps,
            } => Kind::Sampled {
                a: *a,
                base: conj(base),
                pert: conj(pert),
                steps: *steps,
            },
        };
        Self { kind }
    }
}
