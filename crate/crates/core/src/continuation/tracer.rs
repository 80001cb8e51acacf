use alloc::format;

use num_complex::Complex64;
#[allow(unused_imports)] // inherent float methods need std
use num_traits::Float;

use super::{
    classify, CollisionRecord, CouplingModel, EventKind, FreeCoupling, PathSpec, TraceConfig, TraceError, TraceEvent, Trajectory, TrajectoryPoint,
};
use crate::is_finite;
use crate::rootfind::{newton_refine, RootConfig, RootError};

/// Residual a seed must reach after a single Newton polish.
const SEED_RESIDUAL: f64 = 1e-8;
/// Thresholds on `|m|` and `|∂m/∂λ|` for a double zero.
const DOUBLE_RESIDUAL: f64 = 1e-8;
const DOUBLE_SLOPE: f64 = 1e-6;
const DEGENERATE: f64 = 1e-12;
/// Resolution of class-change bisection, in `t`.
const CLASS_CHANGE_RESOLUTION: f64 = 1e-6;

/// Newton at fixed `z`; residuals stalled within `10·newton_tol` are accepted.
fn correct(
    model: &CouplingModel,
    z: Complex64,
    guess: Complex64,
    rc: &RootConfig,
) -> Option<Complex64> {
    match newton_refine(&model.at(z), guess, rc) {
        Ok(l) => Some(l),
        Err(RootError::NoConvergence { last, residual }) if residual <= 10.0 * rc.newton_tol => {
            Some(last)
        }
        Err(_) => None,
    }
}

/// 2-D Newton on `(m, ∂m/∂λ) = 0` over `(λ, z)`.
fn refine_double_root(
    model: &CouplingModel,
    lambda: Complex64,
    z: Complex64,
) -> Option<(Complex64, Complex64)> {
    let (mut l, mut zz) = (lambda, z);
    for _ in 0..60 {
        let (m, ml) = model.miss(l, zz);
        let mz = model.dm_dz(l, zz);
        let mll = model.d2m_dlambda2(l, zz);
        let mlz = model.d2m_dlambda_dz(l, zz);
        let det = ml * mlz - mz * mll;
        if !is_finite(det) || det.norm() == 0.0 {
            return None;
        }
        let dl = (m * mlz - mz * ml) / det;
        let dz = (ml * ml - mll * m) / det;
        l -= dl;
        zz -= dz;
        if !is_finite(l) || !is_finite(zz) {
            return None;
        }
        if dl.norm() + dz.norm() <= 1e-14 * (1.0 + l.norm() + zz.norm()) {
            break;
        }
    }
    let (m, ml) = model.miss(l, zz);
    (m.norm() <= DOUBLE_RESIDUAL && ml.norm() <= DOUBLE_SLOPE).then_some((l, zz))
}

/// Puiseux branches `λ* ± √(−β·dz/α)` leaving the double zero `(z*, λ*)` along `dz`.
pub fn branch_collision(
    model: &CouplingModel,
    z_star: Complex64,
    lambda_star: Complex64,
    dz: Complex64,
) -> Result<(Complex64, Complex64), TraceError> {
    let (m, ml) = model.miss(lambda_star, z_star);
    if !(m.norm() <= DOUBLE_RESIDUAL && ml.norm() <= DOUBLE_SLOPE) {
        return Err(TraceError::NotDoubleRoot {
            residual: m.norm(),
            derivative: ml.norm(),
        });
    }
    let alpha = model.d2m_dlambda2(lambda_star, z_star) * 0.5;
    let beta = model.dm_dz(lambda_star, z_star);
    if alpha.norm() < DEGENERATE || beta.norm() < DEGENERATE {
        return Err(TraceError::DegenerateModel {
            alpha: alpha.norm(),
            beta: beta.norm(),
        });
    }
    let r = (-beta * dz / alpha).sqrt();
    Ok((lambda_star + r, lambda_star - r))
}

/// `dκ/dz = ∫V1φ² / ∫φ²` at a simple zero `λ` of `m(·; z)`.
pub fn kappa_rate(
    model: &CouplingModel,
    z: Complex64,
    lambda: Complex64,
) -> Result<Complex64, TraceError> {
    let (m, ml) = model.miss(lambda, z);
    if !(m.norm() <= SEED_RESIDUAL) {
        return Err(TraceError::NotARoot { residual: m.norm() });
    }
    if !(ml.norm() > TraceConfig::default().collision_threshold) {
        return Err(TraceError::NotSimple {
            derivative: ml.norm(),
        });
    }
    let (norm, weighted) = model.norm_integrals(lambda, z)?;
    Ok(weighted / norm)
}

struct Tracer<'a> {
    model: &'a CouplingModel,
    path: &'a PathSpec,
    cfg: &'a TraceConfig,
    rc: RootConfig,
    out: Trajectory,
}

/// Pending double zero the next step must leave along a Puiseux branch.
#[derive(Clone, Copy)]
struct AtCollision {
    z: Complex64,
    lambda: Complex64,
    t: f64,
    /// Last regular point before the collision.
    previous: Option<(Complex64, Complex64)>,
    norm_integral: Option<Complex64>,
}

enum Step {
    Accepted(Complex64),
    Collision { s: f64, z: Complex64, lambda: Complex64 },
    Rejected,
}

impl Tracer<'_> {
    fn t_of(&self, edge: usize, s: f64) -> f64 {
        (edge as f64 + s) / self.path.edges() as f64
    }

    fn z_of(&self, edge: usize, s: f64) -> Complex64 {
        let v = self.path.vertices();
        if s >= 1.0 {
            v[edge + 1]
        } else if s <= 0.0 {
            v[edge]
        } else {
            v[edge] + (v[edge + 1] - v[edge]) * s
        }
    }

    fn push(&mut self, t: f64, z: Complex64, lambda: Complex64) {
        let class = classify(lambda, self.cfg.band);
        self.out.points.push(TrajectoryPoint { t, z, lambda, class });
    }

    fn event(&mut self, t: f64, kind: EventKind, detail: alloc::string::String) {
        self.out.events.push(TraceEvent {
            t,
            kind,
            detail,
            collision: None,
        });
    }

    /// One predictor–corrector step from `(s0, λ0)` to `s1` on `edge`.
    fn step(&self, edge: usize, s0: f64, s1: f64, lambda: Complex64) -> Step {
        let z0 = self.z_of(edge, s0);
        let z1 = self.z_of(edge, s1);
        let dz = z1 - z0;
        let (_, ml) = self.model.miss(lambda, z0);
        let mz = self.model.dm_dz(lambda, z0);
        let slope = -mz / ml;

        if let Some((s_star, z_star, l_star)) = self.collision_ahead(lambda, z0, dz, ml, mz) {
            return Step::Collision {
                s: s0 + s_star * (s1 - s0),
                z: z_star,
                lambda: l_star,
            };
        }

        let predicted = lambda + slope * dz;
        if !is_finite(predicted) {
            return Step::Rejected;
        }
        let Some(next) = correct(self.model, z1, predicted, &self.rc) else {
            return Step::Rejected;
        };
        let bound = 10.0 * (slope * dz).norm() + 1e-10 * (1.0 + lambda.norm());
        let (_, ml1) = self.model.miss(next, z1);
        if (next - lambda).norm() > bound || ml1.norm() < self.cfg.collision_threshold {
            return Step::Rejected;
        }
        Step::Accepted(next)
    }

    /// A double zero on the segment `z0 → z0 + dz`, as `(fraction, z*, λ*)`.
    fn collision_ahead(
        &self,
        lambda: Complex64,
        z0: Complex64,
        dz: Complex64,
        ml: Complex64,
        mz: Complex64,
    ) -> Option<(f64, Complex64, Complex64)> {
        let mll = self.model.d2m_dlambda2(lambda, z0);
        let offset = ml * ml / (mll * mz * 2.0);
        if !is_finite(offset) {
            return None;
        }
        let len2 = dz.norm_sqr();
        let proj = (offset * dz.conj()).re / len2;
        let perp = (offset - dz * proj).norm();
        if !(-0.1..=1.5).contains(&proj) || perp > 0.5 * dz.norm() {
            return None;
        }
        let (l_star, z_star) = refine_double_root(self.model, lambda, z0 + offset)?;
        let rel = z_star - z0;
        let s = (rel * dz.conj()).re / len2;
        let perp = (rel - dz * s).norm();
        (perp <= 1e-8 * (1.0 + z_star.norm()) && s > 0.0 && s <= 1.0)
            .then_some((s.min(1.0), z_star, l_star))
    }

    /// Leaves a double zero along the branch continuing the incoming motion.
    fn leave_collision(
        &mut self,
        c: &AtCollision,
        z1: Complex64,
    ) -> Result<Option<Complex64>, TraceError> {
        let dz = z1 - c.z;
        let (b0, b1) = match branch_collision(self.model, c.z, c.lambda, dz) {
            Ok(b) => b,
            Err(TraceError::DegenerateModel { .. }) => return Ok(None),
            Err(e) => return Err(e),
        };
        let target = match c.previous {
            Some((zp, lp)) if (c.z - zp).norm() > 0.0 => {
                c.lambda + (c.lambda - lp) * (dz.norm() / (c.z - zp).norm()).sqrt()
            }
            _ => c.lambda,
        };
        let (d0, d1) = ((b0 - target).norm(), (b1 - target).norm());
        let first = if (d0 - d1).abs() <= 1e-6 * (d0 + d1) {
            (b0.re, b0.im) >= (b1.re, b1.im)
        } else {
            d0 < d1
        };
        let (chosen, other) = if first { (b0, b1) } else { (b1, b0) };
        let Some(next) = correct(self.model, z1, chosen, &self.rc) else {
            return Ok(None);
        };
        if (next - other).norm() < (next - chosen).norm() {
            return Ok(None);
        }
        let record = CollisionRecord {
            z: c.z,
            lambda: c.lambda,
            branches: [b0, b1],
            chosen: if first { 0 } else { 1 },
            norm_integral: c.norm_integral,
        };
        self.out.events.push(TraceEvent {
            t: c.t,
            kind: EventKind::Collision,
            detail: format!(
                "z* = {}, λ* = {}, branches {} and {}, continued on {}",
                c.z, c.lambda, b0, b1, chosen
            ),
            collision: Some(record),
        });
        Ok(Some(next))
    }

    /// Bisects the class change between two accepted points.
    fn class_change(
        &mut self,
        edge: usize,
        (mut sa, mut la): (f64, Complex64),
        (mut sb, mut lb): (f64, Complex64),
    ) {
        let from = classify(la, self.cfg.band);
        let to = classify(lb, self.cfg.band);
        let scale = self.path.edges() as f64;
        while (sb - sa) / scale > CLASS_CHANGE_RESOLUTION {
            let sm = 0.5 * (sa + sb);
            let guess = (la + lb) * 0.5;
            let Some(lm) = correct(self.model, self.z_of(edge, sm), guess, &self.rc) else {
                break;
            };
            if classify(lm, self.cfg.band) == from {
                sa = sm;
                la = lm;
            } else {
                sb = sm;
                lb = lm;
            }
        }
        let t = self.t_of(edge, 0.5 * (sa + sb));
        self.event(t, EventKind::ClassChange, format!("{from} -> {to}"));
    }

    fn run(mut self, seed: Complex64) -> Result<Trajectory, TraceError> {
        let mut lambda = seed;
        self.push(0.0, self.path.point(0.0), lambda);
        if self.path.is_point() {
            return Ok(self.out);
        }
        let base = 1.0 / self.path.steps_per_edge() as f64;
        let mut pending: Option<AtCollision> = None;
        // Last regular point, used to orient branch choice.
        let mut previous: Option<(Complex64, Complex64)> = None;

        for edge in 0..self.path.edges() {
            let mut s = 0.0;
            let mut h = base;
            let mut halvings = 0;
            while s < 1.0 {
                let mut s1 = s + h;
                if s1 > 1.0 - 1e-12 {
                    s1 = 1.0;
                }
                let z0 = self.z_of(edge, s);
                let z1 = self.z_of(edge, s1);

                let outcome = if let Some(c) = pending {
                    match self.leave_collision(&c, z1)? {
                        Some(l) => {
                            pending = None;
                            Step::Accepted(l)
                        }
                        None => Step::Rejected,
                    }
                } else {
                    self.step(edge, s, s1, lambda)
                };

                match outcome {
                    Step::Accepted(next) => {
                        let (from, to) = (classify(lambda, self.cfg.band), classify(next, self.cfg.band));
                        if from != to {
                            self.class_change(edge, (s, lambda), (s1, next));
                        }
                        previous = Some((z0, lambda));
                        lambda = next;
                        s = s1;
                        let t = self.t_of(edge, s);
                        self.push(t, z1, lambda);
                        if lambda.norm() > self.cfg.divergence_radius {
                            self.event(t, EventKind::Diverged, format!("|λ| = {:e}", lambda.norm()));
                            return Ok(self.out);
                        }
                        halvings = 0;
                        h = (2.0 * h).min(base);
                    }
                    Step::Collision { s: sc, z, lambda: lc } => {
                        let t = self.t_of(edge, sc);
                        let norm = self.model.norm_integrals(lc, z).ok().map(|n| n.0);
                        if sc > s {
                            previous = Some((z0, lambda));
                            self.push(t, z, lc);
                        }
                        pending = Some(AtCollision {
                            z,
                            lambda: lc,
                            t,
                            previous,
                            norm_integral: norm,
                        });
                        lambda = lc;
                        s = sc;
                        halvings = 0;
                    }
                    Step::Rejected => {
                        halvings += 1;
                        h *= 0.5;
                        if halvings > self.cfg.max_step_halvings {
                            if let Some(c) = self.double_root_here(edge, s, lambda, pending.is_some()) {
                                pending = Some(AtCollision { previous, ..c });
                                halvings = 0;
                                h = base;
                                continue;
                            }
                            let t = self.t_of(edge, s);
                            if lambda.re.abs() <= self.cfg.band {
                                self.event(
                                    t,
                                    EventKind::Terminated,
                                    format!("λ = {lambda} reached the essential spectrum"),
                                );
                                return Ok(self.out);
                            }
                            return Err(TraceError::StepCollapse {
                                t,
                                z: self.z_of(edge, s),
                                lambda,
                            });
                        }
                    }
                }
            }
        }
        Ok(self.out)
    }

    /// The current point as a double zero, when steps collapse right at one.
    fn double_root_here(
        &self,
        edge: usize,
        s: f64,
        lambda: Complex64,
        already: bool,
    ) -> Option<AtCollision> {
        if already {
            return None;
        }
        let z = self.z_of(edge, s);
        let (l_star, z_star) = refine_double_root(self.model, lambda, z)?;
        if (z_star - z).norm() > 1e-8 * (1.0 + z.norm()) {
            return None;
        }
        Some(AtCollision {
            z,
            lambda: l_star,
            t: self.t_of(edge, s),
            previous: None,
            norm_integral: self.model.norm_integrals(l_star, z).ok().map(|n| n.0),
        })
    }
}

/// Follows the zero of `m(·; z)` starting at `seed` as `z` runs along `path`.
pub fn trace(
    model: &CouplingModel,
    path: &PathSpec,
    seed: Complex64,
    cfg: &TraceConfig,
) -> Result<Trajectory, TraceError> {
    cfg.validate()?;
    match model.free_coupling() {
        FreeCoupling::Everywhere => {
            return Err(TraceError::FreeOperatorOnPath { z: path.point(0.0) })
        }
        FreeCoupling::At(z) if path.passes_through(z, 1e-12 * (1.0 + z.norm())) => {
            return Err(TraceError::FreeOperatorOnPath { z })
        }
        _ => {}
    }

    let z0 = path.point(0.0);
    let (m, ml) = model.miss(seed, z0);
    let polished = seed - m / ml;
    let residual = model.miss(polished, z0).0.norm();
    if !is_finite(polished) || !(residual <= SEED_RESIDUAL) {
        return Err(TraceError::SeedNotRoot { residual });
    }
    let rc = cfg.root_config();
    let lambda = correct(model, z0, polished, &rc).unwrap_or(polished);

    Tracer {
        model,
        path,
        cfg,
        rc,
        out: Trajectory::default(),
    }
    .run(lambda)
}
