#![allow(dead_code)]

pub use num_complex::Complex64 as C;
use spectrace_core::Segment;

pub fn c(re: f64, im: f64) -> C {
    C::new(re, im)
}

/// λ with `κ = −λ²` on the eigenvalue sheet (`Re λ > 0`).
pub fn eigen_lambda(kappa: C) -> C {
    let r = (-kappa).sqrt();
    if r.re > 0.0 {
        r
    } else {
        -r
    }
}

pub fn resonance_lambda(kappa: C) -> C {
    -eigen_lambda(kappa)
}

/// Interior solution of a step potential, from hyperbolic closed forms
/// with an explicit square root (independent of the entire-function code).
pub struct ExactPhi {
    pieces: Vec<(f64, f64, C, C, C)>,
    pub phi_a: C,
    pub dphi_a: C,
}

impl ExactPhi {
    pub fn new(segments: &[Segment], lambda: C) -> Self {
        let mut pieces = Vec::new();
        let (mut x0, mut phi, mut dphi) = (0.0, c(0.0, 0.0), c(1.0, 0.0));
        for s in segments {
            let r = (s.value + lambda * lambda).sqrt();
            pieces.push((x0, x0 + s.length, phi, dphi, r));
            let (ch, sh) = ((r * s.length).cosh(), (r * s.length).sinh());
            let (np, nd) = (phi * ch + dphi * sh / r, phi * r * sh + dphi * ch);
            phi = np;
            dphi = nd;
            x0 += s.length;
        }
        Self { pieces, phi_a: phi, dphi_a: dphi }
    }

    pub fn at(&self, x: f64) -> C {
        let p = self
            .pieces
            .iter()
            .find(|p| x <= p.1)
            .unwrap_or(self.pieces.last().unwrap());
        let (a, _, p0, d0, r) = *p;
        p0 * (r * (x - a)).cosh() + d0 * (r * (x - a)).sinh() / r
    }

    pub fn pieces(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.pieces.iter().map(|p| (p.0, p.1))
    }
}

/// Adaptive Simpson quadrature of a complex integrand.
pub fn simpson<F: Fn(f64) -> C>(f: &F, a: f64, b: f64, tol: f64) -> C {
    fn rec<F: Fn(f64) -> C>(f: &F, a: f64, b: f64, fa: C, fm: C, fb: C, whole: C, tol: f64, depth: u32) -> C {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = (fa + flm * 4.0 + fm) * ((m - a) / 6.0);
        let right = (fm + frm * 4.0 + fb) * ((b - m) / 6.0);
        let delta = left + right - whole;
        if depth == 0 || delta.norm() <= 15.0 * tol {
            left + right + delta / 15.0
        } else {
            rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
                + rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
        }
    }
    let (fa, fm, fb) = (f(a), f(0.5 * (a + b)), f(b));
    let whole = (fa + fm * 4.0 + fb) * ((b - a) / 6.0);
    rec(f, a, b, fa, fm, fb, whole, tol, 40)
}

/// `∫₀^∞ φ²` by quadrature over each segment plus the exponential tail.
pub fn quadrature_norm(segments: &[Segment], lambda: C) -> C {
    let phi = ExactPhi::new(segments, lambda);
    let interior: C = phi
        .pieces()
        .map(|(a, b)| simpson(&|x: f64| phi.at(x) * phi.at(x), a, b, 1e-14))
        .sum();
    interior + phi.phi_a * phi.phi_a / (lambda * 2.0)
}

pub fn rng(seed: u64) -> rand::rngs::StdRng {
    rand::SeedableRng::seed_from_u64(seed)
}
