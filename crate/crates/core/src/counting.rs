//! Exact counts and bounds for the unit square well `V = −k²` on `[0, 1]`.

use core::f64::consts::{FRAC_PI_2, PI};

#[allow(unused_imports)] // inherent float methods need std
use num_traits::Float;


/// `θ_n`, the root of `tan θ = θ` in `[nπ, (2n+1)π/2]`; `θ_0 = 0`.
///
/// Bisects the pole-free form `sin θ − θ cos θ` to an interval width of 1e-12.
pub fn tan_theta_root(n: u32) -> f64 {
    if n == 0 {
        return 0.0;
    }
    let g = |t: f64| t.sin() - t * t.cos();
    let mut lo = n as f64 * PI + 1e-9;
    let mut hi = (2 * n + 1) as f64 * FRAC_PI_2 - 1e-9;
    let mut g_lo = g(lo);
    while hi - lo > 1e-12 {
        let mid = 0.5 * (lo + hi);
        let g_mid = g(mid);
        if g_mid == 0.0 {
            return mid;
        }
        if (g_mid > 0.0) == (g_lo > 0.0) {
            lo = mid;
            g_lo = g_mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// `[(2n+1)π/2]²`: depth at which the `n`-th eigenvalue is born at `κ = 0`.
pub fn birth_depth(n: u32) -> f64 {
    let t = (2 * n + 1) as f64 * FRAC_PI_2;
    t * t
}

/// `K_n = θ_n² + 1`: depth at which a resonance pair collides at `κ = −1`.
pub fn collision_depth(n: u32) -> f64 {
    let t = tan_theta_root(n);
    t * t + 1.0
}

/// Number of eigenvalues of the unit well of depth `k_sq`.
pub fn eigenvalue_count_exact(k_sq: f64) -> u32 {
    let mut n = 0;
    while k_sq > birth_depth(n) {
        n += 1;
    }
    n
}

/// Antibound-state count, known only where the closed-form result applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AntiboundCount {
    Exact(u32),
    /// `k² ≤ (π/2)²`: no closed form; use the root finder.
    Unknown,
}

impl AntiboundCount {
    pub fn exact(self) -> Option<u32> {
        match self {
            AntiboundCount::Exact(n) => Some(n),
            AntiboundCount::Unknown => None,
        }
    }
}

/// `n − 1` below `K_n`, `n + 1` from `K_n` on, where `n` is the eigenvalue count.
pub fn antibound_count_exact(k_sq: f64) -> AntiboundCount {
    if !(k_sq > birth_depth(0)) {
        return AntiboundCount::Unknown;
    }
    let n = eigenvalue_count_exact(k_sq);
    if k_sq < collision_depth(n) {
        AntiboundCount::Exact(n - 1)
    } else {
        AntiboundCount::Exact(n + 1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WellCounts {
    pub k_sq: f64,
    pub n_eigen: u32,
    pub n_antibound: AntiboundCount,
}

pub fn well_counts(k_sq: f64) -> WellCounts {
    WellCounts {
        k_sq,
        n_eigen: eigenvalue_count_exact(k_sq),
        n_antibound: antibound_count_exact(k_sq),
    }
}

/// Eigenvalue-count estimates for a constant well of magnitude `|V|` on `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundsReport {
    /// `C·|V|²`, reproduced with the `|V|²` scaling as printed in the source estimate.
    pub frank: f64,
    /// `∫ x V₋ dx = |V|/2`.
    pub bargmann: f64,
    /// `⌊√|V|/π + 1/2⌋`.
    pub count_formula: u32,
    pub interval_lo: f64,
    pub interval_hi: f64,
}

fn frank_objective(eps: f64) -> f64 {
    let q = eps.exp_m1() / eps;
    q * q / (eps * eps)
}

/// Minimiser and minimum of `(1/ε²)((e^ε − 1)/ε)²` by golden-section search.
pub fn frank_constant() -> (f64, f64) {
    let inv_phi = (5.0f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (0.1, 5.0);
    let mut x1 = b - inv_phi * (b - a);
    let mut x2 = a + inv_phi * (b - a);
    let mut f1 = frank_objective(x1);
    let mut f2 = frank_objective(x2);
    while b - a > 1e-9 {
        if f1 < f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = frank_objective(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = frank_objective(x2);
        }
    }
    let eps = 0.5 * (a + b);
    (eps, frank_objective(eps))
}

/// Bounds for the constant well of magnitude `v_abs`. `v_abs = 0` gives all zeros.
pub fn bounds_report(v_abs: f64) -> BoundsReport {
    if v_abs <= 0.0 {
        return BoundsReport {
            frank: 0.0,
            bargmann: 0.0,
            count_formula: 0,
            interval_lo: 0.0,
            interval_hi: 0.0,
        };
    }
    let (_, constant) = frank_constant();
    let interval = v_abs.sqrt() / PI + 0.5;
    BoundsReport {
        frank: constant * v_abs * v_abs,
        bargmann: v_abs / 2.0,
        count_formula: interval.floor() as u32,
        interval_lo: interval,
        interval_hi: interval,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn theta_roots() {
        assert_eq!(tan_theta_root(0), 0.0);
        assert!((tan_theta_root(1) - 4.493409458).abs() < 1e-9);
        assert!((tan_theta_root(2) - 7.725251837).abs() < 1e-9);
        for n in 1..20 {
            let t = tan_theta_root(n);
            assert!((t.sin() - t * t.cos()).abs() < 1e-10);
            assert!(t > n as f64 * PI && t < (2 * n + 1) as f64 * FRAC_PI_2);
        }
    }

    #[test]
    fn eigenvalue_counts() {
        assert_eq!(eigenvalue_count_exact(22.0), 1);
        assert_eq!(eigenvalue_count_exact(1.0), 0);
        assert_eq!(eigenvalue_count_exact(25.0), 2);
        assert_eq!(eigenvalue_count_exact(birth_depth(1)), 1);
    }

    #[test]
    fn antibound_counts() {
        assert_eq!(antibound_count_exact(22.0), AntiboundCount::Exact(2));
        assert_eq!(antibound_count_exact(10.0), AntiboundCount::Exact(0));
        assert_eq!(antibound_count_exact(0.5), AntiboundCount::Unknown);
        assert_eq!(antibound_count_exact(100.0), AntiboundCount::Exact(2));
    }

    #[test]
    fn frank_constant_value() {
        let (eps, c) = frank_constant();
        assert!((c - 2.38436418).abs() < 1e-6);
        assert!((eps - 1.5936).abs() < 1e-3);
    }

    #[test]
    fn bounds() {
        let r = bounds_report(22.0);
        assert_eq!(r.count_formula, 1);
        assert_eq!(r.bargmann, 11.0);
        let z = bounds_report(0.0);
        assert_eq!(z.frank, 0.0);
        assert_eq!(z.count_formula, 0);
        assert_eq!(z.interval_lo, 0.0);
    }

    #[test]
    fn count_formula_matches_exact_count() {
        for &k in &[1.0, 5.0, 10.0, 22.0, 30.0, 60.0, 100.0] {
            assert_eq!(bounds_report(k).count_formula, eigenvalue_count_exact(k));
        }
    }
}
