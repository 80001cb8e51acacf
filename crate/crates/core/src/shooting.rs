//! Shooting for sampled potentials.
//!
//! The interior solution and its λ-derivative are integrated together with
//! classical RK4 on a uniform grid that contains every sample node, so the
//! kinks of the piecewise-linear interpolant fall on step boundaries.

use alloc::vec::Vec;

use num_complex::Complex64;
use thiserror::Error;

use crate::is_finite;
use crate::stepwell::StepPotential;

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum ShootError {
    #[error("sampled potential needs a > 0 and at least two finite samples")]
    InvalidPotential,
    #[error("{steps} steps do not align with {cells} sample cells")]
    GridMismatch { steps: usize, cells: usize },
    #[error("weight potential must share the support and the grid")]
    WeightMismatch,
    #[error("norm integral needs |λ| ≥ 1e-12")]
    ZeroLambda,
}

/// Potential sampled at `x_i = i·a/(n−1)`, linearly interpolated, zero beyond `a`.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledPotential {
    a: f64,
    values: Vec<Complex64>,
}

impl SampledPotential {
    pub fn new(a: f64, values: Vec<Complex64>) -> Result<Self, ShootError> {
        if !(a.is_finite() && a > 0.0) || values.len() < 2 || !values.iter().all(|v| is_finite(*v)) {
            return Err(ShootError::InvalidPotential);
        }
        Ok(Self { a, values })
    }

    /// Samples a step potential on `n` uniform nodes. The final node takes the
    /// value of the last segment rather than the zero outside the support.
    pub fn from_step(p: &StepPotential, n: usize) -> Result<Self, ShootError> {
        if n < 2 {
            return Err(ShootError::InvalidPotential);
        }
        let a = p.support_end();
        let last = p.segments()[p.segments().len() - 1].value;
        let values = (0..n)
            .map(|i| {
                if i + 1 == n {
                    last
                } else {
                    p.value_at(i as f64 * a / (n - 1) as f64)
                }
            })
            .collect();
        Self::new(a, values)
    }

    pub fn support_end(&self) -> f64 {
        self.a
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn cells(&self) -> usize {
        self.values.len() - 1
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn is_identically_zero(&self) -> bool {
        self.values.iter().all(|v| *v == Complex64::new(0.0, 0.0))
    }

    pub fn conj(&self) -> Self {
        Self {
            a: self.a,
            values: self.values.iter().map(|v| v.conj()).collect(),
        }
    }

    /// Smallest multiple of the cell count that reaches `min_steps`.
    pub fn aligned_steps(&self, min_steps: usize) -> usize {
        let cells = self.cells();
        let k = min_steps.div_ceil(cells).max(1);
        k * cells
    }
}

/// Interior solution data at the support end.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShotResult {
    pub phi_a: Complex64,
    pub dphi_a: Complex64,
    pub dlam_phi_a: Complex64,
    pub dlam_dphi_a: Complex64,
}

/// Shot plus the running integrals `∫₀ᵃ φ²` and `∫₀ᵃ W φ²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Integrated {
    pub shot: ShotResult,
    pub square: Complex64,
    pub weighted: Complex64,
}

type State = [Complex64; 6];

#[inline]
fn rhs(y: &State, v: Complex64, w: Complex64, lambda: Complex64) -> State {
    let k = v + lambda * lambda;
    let sq = y[0] * y[0];
    [
        y[1],
        k * y[0],
        y[3],
        k * y[2] + lambda * y[0] * 2.0,
        sq,
        w * sq,
    ]
}

#[inline]
fn axpy(y: &State, h: f64, k: &State) -> State {
    let mut out = *y;
    for (o, d) in out.iter_mut().zip(k.iter()) {
        *o += d * h;
    }
    out
}

pub(crate) fn integrate_full(
    p: &SampledPotential,
    lambda: Complex64,
    steps: usize,
    initial: (Complex64, Complex64),
    weight: Option<&SampledPotential>,
) -> Result<Integrated, ShootError> {
    match weight {
        Some(w) => {
            if w.values.len() != p.values.len() || w.a != p.a {
                return Err(ShootError::WeightMismatch);
            }
            integrate_nodes(p.a, p.cells(), |i| p.values[i], |i| w.values[i], lambda, steps, initial)
        }
        None => integrate_nodes(
            p.a,
            p.cells(),
            |i| p.values[i],
            |_| Complex64::new(0.0, 0.0),
            lambda,
            steps,
            initial,
        ),
    }
}

/// RK4 over `cells` uniform cells of `[0, a]` with node values supplied by
/// `value(i)` and an integration weight `weight(i)`, `i = 0..=cells`.
pub(crate) fn integrate_nodes<V, W>(
    a: f64,
    cells: usize,
    value: V,
    weight: W,
    lambda: Complex64,
    steps: usize,
    initial: (Complex64, Complex64),
) -> Result<Integrated, ShootError>
where
    V: Fn(usize) -> Complex64,
    W: Fn(usize) -> Complex64,
{
    if cells == 0 || steps < cells || steps % cells != 0 {
        return Err(ShootError::GridMismatch { steps, cells });
    }
    let per_cell = steps / cells;
    let h = a / steps as f64;
    let zero = Complex64::new(0.0, 0.0);
    let mut y: State = [initial.0, initial.1, zero, zero, zero, zero];

    let (mut v1, mut w1) = (value(0), weight(0));
    for cell in 0..cells {
        let (v0, w0) = (v1, w1);
        v1 = value(cell + 1);
        w1 = weight(cell + 1);
        for j in 0..per_cell {
            // fractional positions inside the cell
            let s0 = j as f64 / per_cell as f64;
            let sm = (j as f64 + 0.5) / per_cell as f64;
            let s1 = (j + 1) as f64 / per_cell as f64;
            let va = v0 + (v1 - v0) * s0;
            let vm = v0 + (v1 - v0) * sm;
            let vb = v0 + (v1 - v0) * s1;
            let wa = w0 + (w1 - w0) * s0;
            let wm = w0 + (w1 - w0) * sm;
            let wb = w0 + (w1 - w0) * s1;

            let k1 = rhs(&y, va, wa, lambda);
            let k2 = rhs(&axpy(&y, 0.5 * h, &k1), vm, wm, lambda);
            let k3 = rhs(&axpy(&y, 0.5 * h, &k2), vm, wm, lambda);
            let k4 = rhs(&axpy(&y, h, &k3), vb, wb, lambda);
            for i in 0..6 {
                y[i] += (k1[i] + (k2[i] + k3[i]) * 2.0 + k4[i]) * (h / 6.0);
            }
        }
    }

    Ok(Integrated {
        shot: ShotResult {
            phi_a: y[0],
            dphi_a: y[1],
            dlam_phi_a: y[2],
            dlam_dphi_a: y[3],
        },
        square: y[4],
        weighted: y[5],
    })
}

/// Integrates `φ'' = (V + λ²)φ` from `φ(0) = 0`, `φ'(0) = 1` to the support end.
pub fn integrate_phi(
    p: &SampledPotential,
    lambda: Complex64,
    steps: usize,
) -> Result<ShotResult, ShootError> {
    integrate_phi_from(p, lambda, steps, Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0))
}

/// As [`integrate_phi`] with arbitrary initial data.
pub fn integrate_phi_from(
    p: &SampledPotential,
    lambda: Complex64,
    steps: usize,
    phi0: Complex64,
    dphi0: Complex64,
) -> Result<ShotResult, ShootError> {
    integrate_full(p, lambda, steps, (phi0, dphi0), None).map(|r| r.shot)
}

/// `m(λ) = φ'(a) + λφ(a)` and `dm/dλ`.
pub fn miss_sampled(
    p: &SampledPotential,
    lambda: Complex64,
    steps: usize,
) -> Result<(Complex64, Complex64), ShootError> {
    let r = integrate_phi(p, lambda, steps)?;
    Ok((
        r.dphi_a + lambda * r.phi_a,
        r.dlam_dphi_a + r.phi_a + lambda * r.dlam_phi_a,
    ))
}

/// `∫₀^∞ φ²`: interior part integrated alongside the solution, exterior tail `φ(a)²/(2λ)`.
pub fn norm_integral_sampled(
    p: &SampledPotential,
    lambda: Complex64,
    steps: usize,
) -> Result<Complex64, ShootError> {
    if lambda.norm() < 1e-12 {
        return Err(ShootError::ZeroLambda);
    }
    let r = integrate_full(p, lambda, steps, (Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)), None)?;
    Ok(r.square + r.shot.phi_a * r.shot.phi_a / (lambda * 2.0))
}
