//! Differentiation of holomorphic functions by sampling on a small circle.
//!
//! For `g` holomorphic in a disc of radius larger than `r` around `z`,
//!
//! ```text
//! g⁽ᵏ⁾(z) ≈ k! / (N rᵏ) · Σⱼ g(z + r ωʲ) ω^(-jk),   ω = exp(2πi/N)
//! ```
//!
//! is exact up to aliasing of the Taylor coefficient of order `k + N`. Unlike a
//! real-axis difference quotient, nothing cancels as `r` shrinks below the
//! function's natural scale, so moderate radii give near machine precision.

use num_complex::Complex64;
#[allow(unused_imports)] // inherent float methods need std
use num_traits::Float;

/// Number of nodes on the circle.
pub const CIRCLE_NODES: usize = 8;

/// k-th derivative of `g` at `z` from `CIRCLE_NODES` samples on a circle of radius `radius`.
pub fn circle_derivative<G>(g: G, z: Complex64, radius: f64, order: u32) -> Complex64
where
    G: Fn(Complex64) -> Complex64,
{
    let n = CIRCLE_NODES;
    let mut acc = Complex64::new(0.0, 0.0);
    for j in 0..n {
        let angle = 2.0 * core::f64::consts::PI * (j as f64) / (n as f64);
        let node = Complex64::from_polar(1.0, angle);
        let weight = Complex64::from_polar(1.0, -angle * order as f64);
        acc += g(z + node * radius) * weight;
    }
    let mut factorial = 1.0;
    for k in 2..=order {
        factorial *= k as f64;
    }
    acc * (factorial / (n as f64 * radius.powi(order as i32)))
}

/// Default radius for a first or second derivative at a point of size `scale`.
#[inline]
pub fn default_radius(scale: f64) -> f64 {
    1e-3 * (1.0 + scale)
}
