//! Closed forms for piecewise-constant potentials.
//!
//! On a segment where `V = v` is constant the interior equation is
//! `φ'' = (v + λ²) φ`. Its solutions are written through the even entire
//! functions `S(w) = sin √w / √w` and `C(w) = cos √w`, so no square root of
//! `w` ever has to pick a branch.

use alloc::vec::Vec;
use core::ops::Mul;

use num_complex::Complex64;
use thiserror::Error;

use crate::is_finite;

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum StepwellError {
    #[error("a step potential needs at least one segment")]
    Empty,
    #[error("segment {index}: length must be positive and finite, value finite")]
    InvalidSegment { index: usize },
    #[error("norm integral needs |λ| ≥ 1e-12")]
    ZeroLambda,
}

/// Constant `value` on an interval of width `length`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    pub length: f64,
    pub value: Complex64,
}

impl Segment {
    pub fn new(length: f64, value: Complex64) -> Self {
        Self { length, value }
    }
}

/// Piecewise-constant potential on `[0, a]`, zero beyond `a`.
#[derive(Debug, Clone, PartialEq)]
pub struct StepPotential {
    segments: Vec<Segment>,
}

impl StepPotential {
    pub fn new(segments: Vec<Segment>) -> Result<Self, StepwellError> {
        if segments.is_empty() {
            return Err(StepwellError::Empty);
        }
        for (index, s) in segments.iter().enumerate() {
            if !(s.length.is_finite() && s.length > 0.0 && is_finite(s.value)) {
                return Err(StepwellError::InvalidSegment { index });
            }
        }
        Ok(Self { segments })
    }

    /// The square well: `v` on `[0, 1]`.
    pub fn unit_well(v: Complex64) -> Self {
        Self {
            segments: alloc::vec![Segment::new(1.0, v)],
        }
    }

    /// Indicator function of `[0, a]`.
    pub fn indicator(a: f64) -> Result<Self, StepwellError> {
        Self::new(alloc::vec![Segment::new(a, Complex64::new(1.0, 0.0))])
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    /// Right end `a` of the support.
    pub fn support_end(&self) -> f64 {
        self.segments.iter().map(|s| s.length).sum()
    }

    /// Interior breakpoints and the support end, increasing.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut x = 0.0;
        self.segments
            .iter()
            .map(|s| {
                x += s.length;
                x
            })
            .collect()
    }

    /// Value at `x`; segments are closed on the left.
    pub fn value_at(&self, x: f64) -> Complex64 {
        if x < 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        let mut right = 0.0;
        for s in &self.segments {
            right += s.length;
            if x < right {
                return s.value;
            }
        }
        Complex64::new(0.0, 0.0)
    }

    pub fn max_abs(&self) -> f64 {
        self.segments
            .iter()
            .map(|s| s.value.norm())
            .fold(0.0, f64::max)
    }

    pub fn is_identically_zero(&self) -> bool {
        self.segments.iter().all(|s| s.value == Complex64::new(0.0, 0.0))
    }

    /// Complex conjugate potential.
    pub fn conj(&self) -> Self {
        Self {
            segments: self
                .segments
                .iter()
                .map(|s| Segment::new(s.length, s.value.conj()))
                .collect(),
        }
    }
}

/// `S(w) = sin √w / √w` and `C(w) = cos √w`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvenPair {
    pub s: Complex64,
    pub c: Complex64,
}

/// Below this `|w|` the pair is summed from its Taylor series.
const SERIES_SWITCH: f64 = 1e-4;
const SERIES_TERMS: usize = 8;
/// `S'(w) = (C − S)/(2w)` cancels for small `w`; its series is used below this.
const SLOPE_SERIES_SWITCH: f64 = 1.0;
const SLOPE_SERIES_TERMS: usize = 16;

pub fn even_pair(w: Complex64) -> EvenPair {
    if w.norm() < SERIES_SWITCH {
        // S = Σ (-w)^n/(2n+1)!,  C = Σ (-w)^n/(2n)!
        let mut s = Complex64::new(0.0, 0.0);
        let mut c = Complex64::new(0.0, 0.0);
        let mut power = Complex64::new(1.0, 0.0);
        let mut fact_even = 1.0;
        let mut fact_odd = 1.0;
        for n in 0..SERIES_TERMS {
            if n > 0 {
                power *= -w;
                fact_even *= ((2 * n - 1) * (2 * n)) as f64;
                fact_odd *= ((2 * n) * (2 * n + 1)) as f64;
            }
            c += power / fact_even;
            s += power / fact_odd;
        }
        EvenPair { s, c }
    } else {
        let r = w.sqrt();
        EvenPair {
            s: r.sin() / r,
            c: r.cos(),
        }
    }
}

/// `dS/dw`; `dC/dw = -S/2` needs no separate routine.
fn even_slope(w: Complex64, pair: &EvenPair) -> Complex64 {
    if w.norm() < SLOPE_SERIES_SWITCH {
        // S' = Σ_{n≥1} n (-1)^n w^(n-1) / (2n+1)!
        let mut acc = Complex64::new(0.0, 0.0);
        let mut power = Complex64::new(1.0, 0.0);
        let mut fact = 6.0;
        for n in 1..=SLOPE_SERIES_TERMS {
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            acc += power * (sign * n as f64 / fact);
            power *= w;
            fact *= ((2 * n + 2) * (2 * n + 3)) as f64;
        }
        acc
    } else {
        (pair.c - pair.s) / (w * 2.0)
    }
}

/// Characteristic function of the unit square well with depth value `v`:
/// `f(λ) = λ·S(μ²) + C(μ²)` with `μ² = −v − λ²`, and its λ-derivative.
pub fn char_fn(v: Complex64, lambda: Complex64) -> (Complex64, Complex64) {
    let w = -v - lambda * lambda;
    let pair = even_pair(w);
    let slope = even_slope(w, &pair);
    let value = lambda * pair.s + pair.c;
    // d/dλ with dw/dλ = -2λ and C' = -S/2
    let deriv = (lambda + 1.0) * pair.s - lambda * lambda * slope * 2.0;
    (value, deriv)
}

/// Propagator of `(φ, φ')` across one segment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransferMatrix {
    pub m11: Complex64,
    pub m12: Complex64,
    pub m21: Complex64,
    pub m22: Complex64,
}

impl TransferMatrix {
    pub fn identity() -> Self {
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        Self {
            m11: one,
            m12: zero,
            m21: zero,
            m22: one,
        }
    }

    pub fn det(&self) -> Complex64 {
        self.m11 * self.m22 - self.m12 * self.m21
    }

    pub fn apply(&self, phi: Complex64, dphi: Complex64) -> (Complex64, Complex64) {
        (
            self.m11 * phi + self.m12 * dphi,
            self.m21 * phi + self.m22 * dphi,
        )
    }
}

impl Mul for TransferMatrix {
    type Output = TransferMatrix;

    fn mul(self, rhs: TransferMatrix) -> TransferMatrix {
        TransferMatrix {
            m11: self.m11 * rhs.m11 + self.m12 * rhs.m21,
            m12: self.m11 * rhs.m12 + self.m12 * rhs.m22,
            m21: self.m21 * rhs.m11 + self.m22 * rhs.m21,
            m22: self.m21 * rhs.m12 + self.m22 * rhs.m22,
        }
    }
}

/// Exact propagator of `φ'' = (v + λ²) φ` over `length`.
pub fn transfer_step(length: f64, v: Complex64, lambda: Complex64) -> TransferMatrix {
    transfer_with_derivative(length, v, lambda).0
}

/// Transfer matrix and its entrywise λ-derivative.
pub(crate) fn transfer_with_derivative(
    length: f64,
    v: Complex64,
    lambda: Complex64,
) -> (TransferMatrix, TransferMatrix) {
    let omega = v + lambda * lambda;
    let l2 = length * length;
    let w = -omega * l2;
    let pair = even_pair(w);
    let slope = even_slope(w, &pair);
    let m = TransferMatrix {
        m11: pair.c,
        m12: pair.s * length,
        m21: omega * pair.s * length,
        m22: pair.c,
    };
    // dw/dλ = -2λL²
    let dw = lambda * (-2.0 * l2);
    let dc = pair.s * (-0.5) * dw;
    let ds = slope * dw;
    let dm = TransferMatrix {
        m11: dc,
        m12: ds * length,
        m21: (lambda * 2.0 * pair.s + omega * ds) * length,
        m22: dc,
    };
    (m, dm)
}

/// `(φ, φ', ∂λφ, ∂λφ')` at the support end for `φ(0) = 0`, `φ'(0) = 1`.
fn propagate<I>(segments: I, lambda: Complex64) -> [Complex64; 4]
where
    I: IntoIterator<Item = Segment>,
{
    let zero = Complex64::new(0.0, 0.0);
    let mut phi = zero;
    let mut dphi = Complex64::new(1.0, 0.0);
    let mut lphi = zero;
    let mut ldphi = zero;
    for seg in segments {
        let (m, dm) = transfer_with_derivative(seg.length, seg.value, lambda);
        let (nphi, ndphi) = m.apply(phi, dphi);
        let (a, b) = dm.apply(phi, dphi);
        let (c, d) = m.apply(lphi, ldphi);
        phi = nphi;
        dphi = ndphi;
        lphi = a + c;
        ldphi = b + d;
    }
    [phi, dphi, lphi, ldphi]
}

/// Miss function `m(λ) = φ'(a) + λφ(a)` and `dm/dλ`.
pub fn miss_piecewise(p: &StepPotential, lambda: Complex64) -> (Complex64, Complex64) {
    miss_segments(p.segments.iter().copied(), lambda)
}

pub(crate) fn miss_segments<I>(segments: I, lambda: Complex64) -> (Complex64, Complex64)
where
    I: IntoIterator<Item = Segment>,
{
    let [phi, dphi, lphi, ldphi] = propagate(segments, lambda);
    (dphi + lambda * phi, ldphi + phi + lambda * lphi)
}

/// Interior integrals `∫ φ²` over each segment, and `φ(a)`.
pub(crate) fn segment_square_integrals<I>(segments: I, lambda: Complex64) -> (Vec<Complex64>, Complex64)
where
    I: IntoIterator<Item = Segment>,
{
    let mut phi = Complex64::new(0.0, 0.0);
    let mut dphi = Complex64::new(1.0, 0.0);
    let mut pieces = Vec::new();
    for seg in segments {
        let omega = seg.value + lambda * lambda;
        let (phi1, dphi1) = transfer_step(seg.length, seg.value, lambda).apply(phi, dphi);
        pieces.push(square_integral(seg.length, omega, phi, dphi, phi1, dphi1));
        phi = phi1;
        dphi = dphi1;
    }
    (pieces, phi)
}

/// `∫₀ᴸ φ²` for `φ'' = ωφ` with endpoint data `(φ0, φ0')`, `(φ1, φ1')`.
fn square_integral(
    length: f64,
    omega: Complex64,
    phi0: Complex64,
    dphi0: Complex64,
    phi1: Complex64,
    dphi1: Complex64,
) -> Complex64 {
    if (omega * length * length).norm() > 0.5 {
        // (φφ')' = E + 2ωφ² with E = φ'² − ωφ² constant on the segment.
        let energy = dphi0 * dphi0 - omega * phi0 * phi0;
        (phi1 * dphi1 - phi0 * dphi0 - energy * length) / (omega * 2.0)
    } else {
        // φ(x) = Σ b_n (x/L)^n with b_{n+2} = ωL² b_n / ((n+1)(n+2))
        const TERMS: usize = 24;
        let mut b = [Complex64::new(0.0, 0.0); TERMS];
        b[0] = phi0;
        b[1] = dphi0 * length;
        let wl2 = omega * length * length;
        for n in 0..TERMS - 2 {
            b[n + 2] = b[n] * wl2 / (((n + 1) * (n + 2)) as f64);
        }
        let mut acc = Complex64::new(0.0, 0.0);
        for k in 0..(2 * TERMS - 1) {
            let mut ck = Complex64::new(0.0, 0.0);
            let lo = k.saturating_sub(TERMS - 1);
            let hi = k.min(TERMS - 1);
            for i in lo..=hi {
                ck += b[i] * b[k - i];
            }
            acc += ck / ((k + 1) as f64);
        }
        acc * length
    }
}

/// `∫₀^∞ φ²` (square, not modulus) for `φ(0) = 0`, `φ'(0) = 1`, continued past
/// the support as `φ(a)·e^{−λ(x−a)}`.
///
/// Vanishes exactly when a spectral point is not simple.
pub fn norm_integral_step(p: &StepPotential, lambda: Complex64) -> Result<Complex64, StepwellError> {
    if lambda.norm() < 1e-12 {
        return Err(StepwellError::ZeroLambda);
    }
    let (pieces, phi_a) = segment_square_integrals(p.segments.iter().copied(), lambda);
    let interior: Complex64 = pieces.iter().sum();
    Ok(interior + phi_a * phi_a / (lambda * 2.0))
}
