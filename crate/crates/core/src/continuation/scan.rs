use alloc::vec::Vec;

use num_complex::Complex64;

use super::{TraceConfig, TraceError};
use crate::analytic::circle_derivative;
use crate::kappa_of;
use crate::rootfind::{seed_roots, Region, RootError};
use crate::stepwell::{char_fn, norm_integral_step, StepPotential};

/// Bisection resolution in the well depth.
const V_RESOLUTION: f64 = 1e-10;
/// `|Im λ|` below this (relative) counts as real.
const REAL_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScanEventKind {
    /// Two real zeros merge and leave the real axis as a conjugate pair, or the reverse.
    Collision,
    /// A zero passes through `λ = 0`, i.e. `κ` crosses 0.
    ZeroCrossing,
}

impl ScanEventKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ScanEventKind::Collision => "Collision",
            ScanEventKind::ZeroCrossing => "ZeroCrossing",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanEvent {
    pub v: f64,
    pub kind: ScanEventKind,
    pub lambda: Complex64,
    /// `∫φ²` at a collision.
    pub norm_integral: Option<Complex64>,
}

impl ScanEvent {
    pub fn kappa(&self) -> Complex64 {
        kappa_of(self.lambda)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanSample {
    pub v: f64,
    pub roots: Vec<Complex64>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ScanLog {
    /// Ordered from `v_from` towards `v_to`.
    pub events: Vec<ScanEvent>,
    pub samples: Vec<ScanSample>,
}

fn miss(v: f64, lambda: Complex64) -> (Complex64, Complex64) {
    char_fn(Complex64::new(v, 0.0), lambda)
}

fn is_real(l: Complex64) -> bool {
    l.im.abs() <= REAL_TOL * (1.0 + l.norm())
}

fn roots_at(v: f64, region: &Region, cfg: &TraceConfig) -> Result<Vec<Complex64>, TraceError> {
    let f = move |l: Complex64| miss(v, l);
    let rc = cfg.root_config();
    let mut r = *region;
    let mut attempts = 0;
    loop {
        match seed_roots(&f, &r, &rc) {
            Ok(entries) => return Ok(entries.into_iter().map(|e| e.lambda).collect()),
            Err(RootError::BoundaryZero { .. }) if attempts < 3 => {
                attempts += 1;
                r = r.inflate(0.01);
            }
            Err(e) => return Err(e.into()),
        }
    }
}

/// Greedy nearest assignment; returns `(index in a, index in b)` pairs.
fn greedy_match(a: &[Complex64], b: &[Complex64]) -> Vec<(usize, usize)> {
    let mut pairs: Vec<(f64, usize, usize)> = Vec::with_capacity(a.len() * b.len());
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            pairs.push(((x - y).norm(), i, j));
        }
    }
    pairs.sort_by(|p, q| p.0.partial_cmp(&q.0).unwrap_or(core::cmp::Ordering::Equal));
    let mut used_a = alloc::vec![false; a.len()];
    let mut used_b = alloc::vec![false; b.len()];
    let mut out = Vec::new();
    for (_, i, j) in pairs {
        if !used_a[i] && !used_b[j] {
            used_a[i] = true;
            used_b[j] = true;
            out.push((i, j));
        }
    }
    out
}

/// Critical point of `x ↦ m(x; v)` on the real axis near `guess`.
fn real_critical_point(v: f64, guess: f64) -> Option<(f64, f64, f64)> {
    let mut x = guess;
    for _ in 0..60 {
        let d1 = miss(v, Complex64::new(x, 0.0)).1.re;
        let d2 = circle_derivative(|l| miss(v, l).1, Complex64::new(x, 0.0), 1e-3, 1).re;
        if d2 == 0.0 || !d2.is_finite() {
            return None;
        }
        let step = d1 / d2;
        x -= step;
        if !x.is_finite() || (x - guess).abs() > 1.0 {
            return None;
        }
        if step.abs() <= 1e-14 * (1.0 + x.abs()) {
            break;
        }
    }
    let m = miss(v, Complex64::new(x, 0.0)).0.re;
    let d2 = circle_derivative(|l| miss(v, l).1, Complex64::new(x, 0.0), 1e-3, 1).re;
    Some((x, m, d2))
}

/// Negative when the two real zeros around the critical point exist,
/// positive when they have become a complex pair.
fn merge_indicator(v: f64, guess: f64) -> Option<(f64, f64)> {
    let (x, m, d2) = real_critical_point(v, guess)?;
    Some((m * d2.signum(), x))
}

fn bisect<P>(mut a: f64, mut b: f64, mut pred: P) -> Option<f64>
where
    P: FnMut(f64) -> Option<bool>,
{
    let pa = pred(a)?;
    if pred(b)? == pa {
        return None;
    }
    while (b - a).abs() > V_RESOLUTION {
        let m = 0.5 * (a + b);
        if pred(m)? == pa {
            a = m;
        } else {
            b = m;
        }
    }
    Some(0.5 * (a + b))
}

fn refine_collision(va: f64, vb: f64, guess: f64) -> Option<ScanEvent> {
    let mut x = guess;
    let v = bisect(va, vb, |v| {
        let (h, xc) = merge_indicator(v, x)?;
        x = xc;
        Some(h < 0.0)
    })?;
    let (_, xc) = merge_indicator(v, x)?;
    let lambda = Complex64::new(xc, 0.0);
    let norm = norm_integral_step(&StepPotential::unit_well(Complex64::new(v, 0.0)), lambda).ok();
    Some(ScanEvent {
        v,
        kind: ScanEventKind::Collision,
        lambda,
        norm_integral: norm,
    })
}

/// Collision candidates between two samples: real zeros without a real
/// partner on the other side, taken in adjacent pairs, and real zeros whose
/// nearest match left the axis.
fn collision_guesses(a: &[Complex64], b: &[Complex64], threshold: f64) -> Vec<f64> {
    let mut guesses = Vec::new();
    let pairs = greedy_match(a, b);
    for (side, other, flip) in [(a, b, false), (b, a, true)] {
        let mut lonely: Vec<f64> = Vec::new();
        for (i, l) in side.iter().enumerate() {
            if !is_real(*l) {
                continue;
            }
            let partner = pairs
                .iter()
                .find(|p| if flip { p.1 == i } else { p.0 == i })
                .map(|p| if flip { other[p.0] } else { other[p.1] });
            match partner {
                Some(q) if is_real(q) && (q - l).norm() <= threshold => {}
                Some(q) if !is_real(q) => guesses.push(0.5 * (l.re + q.re)),
                _ => lonely.push(l.re),
            }
        }
        lonely.sort_by(|x, y| x.partial_cmp(y).unwrap_or(core::cmp::Ordering::Equal));
        for w in lonely.windows(2) {
            guesses.push(0.5 * (w[0] + w[1]));
        }
    }
    guesses
}

/// Sweeps the depth of the unit square well from `v_from` to `v_to`.
pub fn scan_real_well(
    v_from: f64,
    v_to: f64,
    samples: usize,
    region: &Region,
    cfg: &TraceConfig,
) -> Result<ScanLog, TraceError> {
    cfg.validate()?;
    let lo = v_from.min(v_to);
    let hi = v_from.max(v_to);
    if samples < 2 || !(lo.is_finite() && hi.is_finite()) || (lo <= 0.0 && hi >= 0.0) {
        return Err(TraceError::InvalidScan);
    }

    let mut log = ScanLog::default();
    for k in 0..samples {
        let v = v_from + (v_to - v_from) * k as f64 / (samples - 1) as f64;
        let roots = roots_at(v, region, cfg)?;
        log.samples.push(ScanSample { v, roots });
    }

    let mut motions: Vec<f64> = Vec::new();
    for w in log.samples.windows(2) {
        for (i, j) in greedy_match(&w[0].roots, &w[1].roots) {
            motions.push((w[0].roots[i] - w[1].roots[j]).norm());
        }
    }
    motions.sort_by(|x, y| x.partial_cmp(y).unwrap_or(core::cmp::Ordering::Equal));
    let median = motions.get(motions.len() / 2).copied().unwrap_or(0.0);
    let threshold = 5.0 * median;

    let origin_inside = region.contains(Complex64::new(0.0, 0.0));
    for w in log.samples.windows(2) {
        let (va, vb) = (w[0].v, w[1].v);
        let mut found: Vec<ScanEvent> = Vec::new();

        if origin_inside {
            let zero_miss = |v: f64| Some(miss(v, Complex64::new(0.0, 0.0)).0.re > 0.0);
            if let Some(v) = bisect(va, vb, zero_miss) {
                found.push(ScanEvent {
                    v,
                    kind: ScanEventKind::ZeroCrossing,
                    lambda: Complex64::new(0.0, 0.0),
                    norm_integral: None,
                });
            }
        }

        for g in collision_guesses(&w[0].roots, &w[1].roots, threshold) {
            if let Some(e) = refine_collision(va, vb, g) {
                let duplicate = found.iter().any(|f| {
                    f.kind == ScanEventKind::Collision && (f.lambda - e.lambda).norm() < 1e-6
                });
                if !duplicate {
                    found.push(e);
                }
            }
        }
        found.sort_by(|x, y| {
            (x.v - v_from)
                .abs()
                .partial_cmp(&(y.v - v_from).abs())
                .unwrap_or(core::cmp::Ordering::Equal)
        });
        log.events.extend(found);
    }
    Ok(log)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::counting::{birth_depth, collision_depth};

    #[test]
    fn rejects_free_well_in_range() {
        let r = Region::from_bounds(-2.0, -2.0, 2.0, 2.0).unwrap();
        let cfg = TraceConfig::default();
        assert_eq!(scan_real_well(1.0, -1.0, 10, &r, &cfg), Err(TraceError::InvalidScan));
        assert_eq!(scan_real_well(-1.0, -2.0, 1, &r, &cfg), Err(TraceError::InvalidScan));
    }

    #[test]
    fn quiet_range_has_no_events() {
        let r = Region::from_bounds(-3.0, -3.0, 3.0, 3.0).unwrap();
        let log = scan_real_well(-0.5, -1.5, 11, &r, &TraceConfig::default()).unwrap();
        assert!(log.events.is_empty());
        let n0 = log.samples[0].roots.len();
        assert!(log.samples.iter().all(|s| s.roots.len() == n0));
    }

    #[test]
    fn first_birth_and_collision() {
        let r = Region::from_bounds(-4.0, -6.0, 4.0, 6.0).unwrap();
        let log = scan_real_well(-1.0, -23.0, 45, &r, &TraceConfig::default()).unwrap();
        let births: Vec<_> = log.events.iter().filter(|e| e.kind == ScanEventKind::ZeroCrossing).collect();
        let hits: Vec<_> = log.events.iter().filter(|e| e.kind == ScanEventKind::Collision).collect();
        assert_eq!(births.len(), 2, "{:?}", log.events);
        assert!((births[0].v + birth_depth(0)).abs() < 1e-8);
        assert!((births[1].v + birth_depth(1)).abs() < 1e-8);
        assert_eq!(hits.len(), 1, "{:?}", log.events);
        assert!((hits[0].v + collision_depth(1)).abs() < 1e-6);
        assert!((hits[0].lambda.re + 1.0).abs() < 1e-5);
        assert!(hits[0].norm_integral.unwrap().norm() < 1e-5);
    }
}
