//! Zeros of entire functions of one complex variable.
//!
//! [`winding_count`] counts zeros inside an axis-aligned rectangle from the
//! accumulated phase of `f` along the boundary, [`newton_refine`] polishes a
//! single zero, and [`seed_roots`] combines the two into a quadrisection
//! search that returns every zero of a rectangle.

use alloc::vec::Vec;
use core::f64::consts::{FRAC_PI_2, TAU};

use num_complex::Complex64;
#[allow(unused_imports)] // inherent float methods need std
use num_traits::Float;
use thiserror::Error;

use crate::is_finite;

/// An entire function together with its derivative.
///
/// Implementations must be safe to evaluate concurrently from shared references.
pub trait AnalyticFn {
    /// Returns `(f(λ), f'(λ))`.
    fn eval(&self, lambda: Complex64) -> (Complex64, Complex64);

    fn value(&self, lambda: Complex64) -> Complex64 {
        self.eval(lambda).0
    }
}

impl<F> AnalyticFn for F
where
    F: Fn(Complex64) -> (Complex64, Complex64),
{
    fn eval(&self, lambda: Complex64) -> (Complex64, Complex64) {
        self(lambda)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum RootError {
    #[error("Newton iteration did not converge (last iterate {last}, |f| = {residual:e})")]
    NoConvergence { last: Complex64, residual: f64 },
    #[error("derivative vanished at {at}; probable multiple root")]
    DerivativeVanished { at: Complex64 },
    #[error("non-finite value encountered at {at}")]
    NonFinite { at: Complex64 },
    #[error("zero of f on the rectangle boundary near {at}")]
    BoundaryZero { at: Complex64 },
    #[error("argument principle unresolved (winding {winding})")]
    Unresolved { winding: f64 },
    #[error("rectangle corners must satisfy lo < hi componentwise")]
    InvalidRegion,
    #[error("root configuration fields must be positive")]
    InvalidConfig,
}

/// Axis-aligned rectangle in the λ-plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Region {
    lo: Complex64,
    hi: Complex64,
}

impl Region {
    pub fn new(lo: Complex64, hi: Complex64) -> Result<Self, RootError> {
        let ok = is_finite(lo) && is_finite(hi) && lo.re < hi.re && lo.im < hi.im;
        if ok {
            Ok(Self { lo, hi })
        } else {
            Err(RootError::InvalidRegion)
        }
    }

    /// Rectangle `[re0, re1] × [im0, im1]`.
    pub fn from_bounds(re0: f64, im0: f64, re1: f64, im1: f64) -> Result<Self, RootError> {
        Self::new(Complex64::new(re0, im0), Complex64::new(re1, im1))
    }

    /// Square of half-width `half` centred at `center`.
    pub fn around(center: Complex64, half: f64) -> Result<Self, RootError> {
        let d = Complex64::new(half, half);
        Self::new(center - d, center + d)
    }

    pub fn lo(&self) -> Complex64 {
        self.lo
    }

    pub fn hi(&self) -> Complex64 {
        self.hi
    }

    pub fn width(&self) -> f64 {
        self.hi.re - self.lo.re
    }

    pub fn height(&self) -> f64 {
        self.hi.im - self.lo.im
    }

    pub fn centroid(&self) -> Complex64 {
        (self.lo + self.hi) * 0.5
    }

    /// Point at fractional position `(fx, fy)` inside the rectangle.
    pub fn at(&self, fx: f64, fy: f64) -> Complex64 {
        Complex64::new(
            self.lo.re + fx * self.width(),
            self.lo.im + fy * self.height(),
        )
    }

    pub fn contains(&self, z: Complex64) -> bool {
        self.contains_with_margin(z, 0.0)
    }

    pub fn contains_with_margin(&self, z: Complex64, margin: f64) -> bool {
        z.re >= self.lo.re - margin
            && z.re <= self.hi.re + margin
            && z.im >= self.lo.im - margin
            && z.im <= self.hi.im + margin
    }

    /// Grows every side by `fraction` of the corresponding extent.
    pub fn inflate(&self, fraction: f64) -> Self {
        let d = Complex64::new(fraction * self.width(), fraction * self.height());
        Self {
            lo: self.lo - d,
            hi: self.hi + d,
        }
    }

    /// Splits at fractional position `(fx, fy)` into four children.
    pub fn quarters(&self, fx: f64, fy: f64) -> [Region; 4] {
        let m = self.at(fx, fy);
        let (lo, hi) = (self.lo, self.hi);
        [
            Region { lo, hi: m },
            Region {
                lo: Complex64::new(m.re, lo.im),
                hi: Complex64::new(hi.re, m.im),
            },
            Region { lo: m, hi },
            Region {
                lo: Complex64::new(lo.re, m.im),
                hi: Complex64::new(m.re, hi.im),
            },
        ]
    }

    fn diameter(&self) -> f64 {
        (self.hi - self.lo).norm()
    }

    /// Corners in counter-clockwise order starting at `lo`.
    fn corners(&self) -> [Complex64; 4] {
        [
            self.lo,
            Complex64::new(self.hi.re, self.lo.im),
            self.hi,
            Complex64::new(self.lo.re, self.hi.im),
        ]
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RootConfig {
    /// Convergence threshold on `|f|`.
    pub newton_tol: f64,
    pub max_iter: usize,
    /// Roots closer than this are merged.
    pub min_separation: f64,
    /// Subdivision recursion limit.
    pub max_depth: usize,
}

impl Default for RootConfig {
    fn default() -> Self {
        Self {
            newton_tol: 1e-12,
            max_iter: 50,
            min_separation: 1e-8,
            max_depth: 12,
        }
    }
}

impl RootConfig {
    pub fn validate(&self) -> Result<(), RootError> {
        let ok = self.newton_tol > 0.0
            && self.max_iter > 0
            && self.min_separation > 0.0
            && self.max_depth > 0;
        if ok {
            Ok(())
        } else {
            Err(RootError::InvalidConfig)
        }
    }
}

/// Outcome of locating one zero during [`seed_roots`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RootStatus {
    /// Newton converged to a simple zero inside its box.
    Converged,
    /// The box still holds several zeros at the depth limit; reported once.
    Multiple,
    /// Newton failed from every seed; `lambda` is the box centroid.
    Failed,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RootEntry {
    pub lambda: Complex64,
    /// Zero count this entry stands for (1 unless `status` is `Multiple` or `Failed`).
    pub multiplicity: u32,
    pub status: RootStatus,
    /// `|f(lambda)|`
    pub residual: f64,
}

/// Minimum `|f'|` before Newton gives up on an iterate.
const DERIVATIVE_FLOOR: f64 = 1e-300;
const MAX_HALVINGS: usize = 8;

/// Newton iteration `λ ← λ − f/f'` with step halving whenever `|f|` fails to decrease.
pub fn newton_refine<F>(f: &F, seed: Complex64, cfg: &RootConfig) -> Result<Complex64, RootError>
where
    F: AnalyticFn + ?Sized,
{
    if !is_finite(seed) {
        return Err(RootError::NonFinite { at: seed });
    }
    let mut x = seed;
    let (mut fx, mut dfx) = f.eval(x);
    for _ in 0..cfg.max_iter {
        if !is_finite(fx) {
            return Err(RootError::NonFinite { at: x });
        }
        let residual = fx.norm();
        if residual <= cfg.newton_tol {
            return Ok(x);
        }
        if !is_finite(dfx) || dfx.norm() < DERIVATIVE_FLOOR {
            return Err(RootError::DerivativeVanished { at: x });
        }
        let step = fx / dfx;
        let mut scale = 1.0;
        let mut next = None;
        for _ in 0..=MAX_HALVINGS {
            let trial = x - step * scale;
            let (ft, dft) = f.eval(trial);
            if is_finite(ft) && ft.norm() < residual {
                next = Some((trial, ft, dft));
                break;
            }
            scale *= 0.5;
        }
        match next {
            Some((xn, fn_, dfn)) => {
                x = xn;
                fx = fn_;
                dfx = dfn;
            }
            // Stalled at the rounding floor of f.
            None => {
                return Err(RootError::NoConvergence { last: x, residual });
            }
        }
    }
    if is_finite(fx) && fx.norm() <= cfg.newton_tol {
        Ok(x)
    } else {
        Err(RootError::NoConvergence {
            last: x,
            residual: fx.norm(),
        })
    }
}

/// `|f|` below this on the contour is treated as a zero on the boundary.
const BOUNDARY_ZERO: f64 = 1e-13;
const MAX_BOUNDARY_POINTS: usize = 1_000_000;
const MIN_EDGE_SAMPLES: usize = 32;
const MAX_EDGE_SPACING: f64 = 0.05;

/// Number of zeros of `f` inside `region`, counted with multiplicity.
pub fn winding_count<F>(f: &F, region: &Region) -> Result<i64, RootError>
where
    F: AnalyticFn + ?Sized,
{
    let phase = boundary_phase(f, region)?;
    let turns = phase / TAU;
    let rounded = turns.round();
    if (turns - rounded).abs() > 0.25 {
        return Err(RootError::Unresolved { winding: turns });
    }
    Ok(rounded as i64)
}

/// Total change of `arg f` around the boundary, counter-clockwise.
fn boundary_phase<F>(f: &F, region: &Region) -> Result<f64, RootError>
where
    F: AnalyticFn + ?Sized,
{
    let corners = region.corners();
    let mut evaluations = 0usize;
    let sample = |z: Complex64, evaluations: &mut usize| -> Result<Complex64, RootError> {
        *evaluations += 1;
        if *evaluations > MAX_BOUNDARY_POINTS {
            return Err(RootError::Unresolved {
                winding: f64::NAN,
            });
        }
        let v = f.value(z);
        if !is_finite(v) {
            return Err(RootError::NonFinite { at: z });
        }
        if v.norm() < BOUNDARY_ZERO {
            return Err(RootError::BoundaryZero { at: z });
        }
        Ok(v)
    };

    let mut total = 0.0;
    let mut stack: Vec<(Complex64, Complex64, Complex64, Complex64)> = Vec::new();
    for k in 0..4 {
        let a = corners[k];
        let b = corners[(k + 1) % 4];
        let len = (b - a).norm();
        let n = MIN_EDGE_SAMPLES.max((len / MAX_EDGE_SPACING).ceil() as usize);
        let mut prev_z = a;
        let mut prev_f = sample(a, &mut evaluations)?;
        for j in 1..=n {
            let z = if j == n {
                b
            } else {
                a + (b - a) * (j as f64 / n as f64)
            };
            let fz = sample(z, &mut evaluations)?;
            stack.push((prev_z, prev_f, z, fz));
            while let Some((za, fa, zb, fb)) = stack.pop() {
                let d = (fb * fa.conj()).arg();
                if d.abs() < FRAC_PI_2 {
                    total += d;
                    continue;
                }
                if (zb - za).norm() <= 1e-13 * (1.0 + za.norm()) {
                    return Err(RootError::BoundaryZero { at: za });
                }
                let zm = (za + zb) * 0.5;
                let fm = sample(zm, &mut evaluations)?;
                stack.push((zm, fm, zb, fb));
                stack.push((za, fa, zm, fm));
            }
            prev_z = z;
            prev_f = fz;
        }
    }
    Ok(total)
}

/// Off-centre split positions tried in turn; an exact bisection would put
/// split lines on the real axis, where real roots live.
const SPLITS: [(f64, f64); 5] = [
    (0.5127, 0.4907),
    (0.4689, 0.5229),
    (0.5457, 0.5383),
    (0.4381, 0.4459),
    (0.5803, 0.4177),
];

/// Every zero of `f` inside `region`, sorted by `(re, im)`.
///
/// Boxes are quadrisected until each holds one zero, which is then polished by
/// Newton from the centroid or a 3×3 grid of fallback seeds. Boxes that still
/// hold several zeros at `max_depth` are reported once with status
/// [`RootStatus::Multiple`]. The multiplicities of the returned entries sum to
/// the winding count of `region`.
pub fn seed_roots<F>(f: &F, region: &Region, cfg: &RootConfig) -> Result<Vec<RootEntry>, RootError>
where
    F: AnalyticFn + ?Sized,
{
    cfg.validate()?;
    let count = winding_count(f, region)?;
    let mut found = Vec::new();
    locate(f, region, count, 0, cfg, &mut found);

    found.sort_by(|a, b| {
        a.lambda
            .re
            .partial_cmp(&b.lambda.re)
            .unwrap_or(core::cmp::Ordering::Equal)
            .then(
                a.lambda
                    .im
                    .partial_cmp(&b.lambda.im)
                    .unwrap_or(core::cmp::Ordering::Equal),
            )
    });
    let mut merged: Vec<RootEntry> = Vec::with_capacity(found.len());
    for entry in found {
        match merged
            .iter_mut()
            .find(|kept| (kept.lambda - entry.lambda).norm() <= cfg.min_separation)
        {
            Some(kept) => {
                kept.multiplicity = kept.multiplicity.max(entry.multiplicity);
                if entry.residual < kept.residual {
                    kept.lambda = entry.lambda;
                    kept.residual = entry.residual;
                }
            }
            None => merged.push(entry),
        }
    }
    Ok(merged)
}

fn locate<F>(
    f: &F,
    region: &Region,
    count: i64,
    depth: usize,
    cfg: &RootConfig,
    out: &mut Vec<RootEntry>,
) where
    F: AnalyticFn + ?Sized,
{
    if count <= 0 {
        return;
    }
    if count == 1 {
        let margin = 1e-9 * region.diameter();
        let fractions = [0.5, 1.0 / 6.0, 5.0 / 6.0];
        for &fy in &fractions {
            for &fx in &fractions {
                if let Ok(root) = newton_refine(f, region.at(fx, fy), cfg) {
                    if region.contains_with_margin(root, margin) {
                        out.push(RootEntry {
                            lambda: root,
                            multiplicity: 1,
                            status: RootStatus::Converged,
                            residual: f.value(root).norm(),
                        });
                        return;
                    }
                }
            }
        }
        if depth >= cfg.max_depth {
            let c = region.centroid();
            out.push(RootEntry {
                lambda: c,
                multiplicity: 1,
                status: RootStatus::Failed,
                residual: f.value(c).norm(),
            });
            return;
        }
    } else if depth >= cfg.max_depth {
        let c = region.centroid();
        let lambda = match newton_refine(f, c, cfg) {
            Ok(root) if region.contains(root) => root,
            _ => c,
        };
        out.push(RootEntry {
            lambda,
            multiplicity: count as u32,
            status: RootStatus::Multiple,
            residual: f.value(lambda).norm(),
        });
        return;
    }

    for &(fx, fy) in &SPLITS {
        let children = region.quarters(fx, fy);
        let mut counts = [0i64; 4];
        let mut ok = true;
        for (slot, child) in counts.iter_mut().zip(children.iter()) {
            match winding_count(f, child) {
                Ok(c) => *slot = c,
                Err(_) => {
                    ok = false;
                    break;
                }
            }
        }
        if ok && counts.iter().sum::<i64>() == count {
            for (child, &c) in children.iter().zip(counts.iter()) {
                locate(f, child, c, depth + 1, cfg, out);
            }
            return;
        }
    }

    let c = region.centroid();
    out.push(RootEntry {
        lambda: c,
        multiplicity: count as u32,
        status: RootStatus::Failed,
        residual: f.value(c).norm(),
    });
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn cubic(l: Complex64) -> (Complex64, Complex64) {
        // (λ-1)²(λ+i)
        let a = l - 1.0;
        let b = l + Complex64::i();
        (a * a * b, a * a + b * a * 2.0)
    }

    #[test]
    fn linear_function_converges_in_one_step() {
        let f = |l: Complex64| (l - 1.0, c(1.0, 0.0));
        let root = newton_refine(&f, c(0.0, 0.0), &RootConfig::default()).unwrap();
        assert_eq!(root, c(1.0, 0.0));
    }

    #[test]
    fn cubic_with_double_root_counts_three() {
        let r = Region::from_bounds(-2.0, -2.0, 2.0, 2.0).unwrap();
        assert_eq!(winding_count(&cubic, &r).unwrap(), 3);
    }

    #[test]
    fn exponential_has_no_zeros() {
        let f = |l: Complex64| (l.exp(), l.exp());
        let r = Region::from_bounds(-10.0, -10.0, 10.0, 10.0).unwrap();
        assert_eq!(winding_count(&f, &r).unwrap(), 0);
        assert!(seed_roots(&f, &r, &RootConfig::default()).unwrap().is_empty());
    }

    #[test]
    fn zero_on_boundary_is_reported() {
        let f = |l: Complex64| (l - 1.0, c(1.0, 0.0));
        let r = Region::from_bounds(1.0, -1.0, 2.0, 1.0).unwrap();
        assert!(matches!(
            winding_count(&f, &r),
            Err(RootError::BoundaryZero { .. })
        ));
    }

    #[test]
    fn double_root_is_flagged_multiple() {
        let r = Region::from_bounds(-2.0, -2.0, 2.0, 2.0).unwrap();
        let roots = seed_roots(&cubic, &r, &RootConfig::default()).unwrap();
        let total: u32 = roots.iter().map(|e| e.multiplicity).sum();
        assert_eq!(total, 3);
        assert!(roots
            .iter()
            .any(|e| e.status == RootStatus::Multiple && (e.lambda - 1.0).norm() < 1e-3));
        assert!(roots
            .iter()
            .any(|e| e.status == RootStatus::Converged && (e.lambda + Complex64::i()).norm() < 1e-12));
    }

    #[test]
    fn derivative_vanishing_is_an_error() {
        let f = |l: Complex64| (l * l + 1.0, l * 2.0);
        assert!(matches!(
            newton_refine(&f, c(0.0, 0.0), &RootConfig::default()),
            Err(RootError::DerivativeVanished { .. })
        ));
    }

    #[test]
    fn invalid_regions_rejected() {
        assert!(Region::from_bounds(1.0, 0.0, 0.0, 1.0).is_err());
        assert!(Region::from_bounds(0.0, 0.0, 1.0, 0.0).is_err());
        assert!(Region::from_bounds(0.0, f64::NAN, 1.0, 1.0).is_err());
    }

    #[test]
    fn quarters_conserve_counts() {
        let r = Region::from_bounds(-2.0, -2.0, 2.0, 2.0).unwrap();
        let parent = winding_count(&cubic, &r).unwrap();
        let kids: i64 = r
            .quarters(0.37, 0.61)
            .iter()
            .map(|q| winding_count(&cubic, q).unwrap())
            .sum();
        assert_eq!(parent, kids);
    }
}
