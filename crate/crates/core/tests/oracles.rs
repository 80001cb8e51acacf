mod common;

use common::*;
use rand::Rng;
use spectrace_core::*;

const V22: C = C::new(-22.0, 0.0);

fn two_step() -> StepPotential {
    StepPotential::new(vec![Segment::new(0.4, c(-3.0, 1.0)), Segment::new(0.6, c(-10.0, 0.0))]).unwrap()
}

#[test]
fn norm_integral_matches_quadrature_at_bound_state() {
    let p = StepPotential::unit_well(V22);
    let l = newton_refine(&|l| char_fn(V22, l), c(3.93, 0.0), &RootConfig::default()).unwrap();
    let exact = norm_integral_step(&p, l).unwrap();
    let quad = quadrature_norm(p.segments(), l);
    assert!((exact - quad).norm() < 1e-8 * quad.norm(), "{exact} vs {quad}");
    // 40-digit reference
    assert!((exact - c(0.09546393789822347, 0.0)).norm() < 1e-12);
}

#[test]
fn norm_integral_off_zero_matches_references() {
    let p = two_step();
    let l = c(0.7, -0.3);
    let exact = norm_integral_step(&p, l).unwrap();
    let reference = c(0.11945017503657542, 0.005937135809668983);
    assert!((exact - reference).norm() < 1e-12, "{exact}");
    assert!((exact - quadrature_norm(p.segments(), l)).norm() < 1e-10);
    let (m, _) = miss_piecewise(&p, l);
    assert!((m - c(-1.2387910888621992, -0.12229824166584883)).norm() < 1e-12, "{m}");
}

#[test]
fn free_norm_integral() {
    let p = StepPotential::unit_well(c(0.0, 0.0));
    let n = norm_integral_step(&p, c(1.0, 0.0)).unwrap();
    let s = 1.0f64.sinh();
    let exact = ((2.0f64).sinh() - 2.0) / 4.0 + s * s / 2.0;
    assert!((n - exact).norm() < 1e-13);
    assert!((n - quadrature_norm(p.segments(), c(1.0, 0.0))).norm() < 1e-12);
}

#[test]
fn random_norm_integrals_match_quadrature() {
    let mut rng = rng(7);
    for _ in 0..20 {
        let segs: Vec<Segment> = (0..3)
            .map(|_| Segment::new(rng.gen_range(0.1..0.8), c(rng.gen_range(-30.0..5.0), rng.gen_range(-5.0..5.0))))
            .collect();
        let p = StepPotential::new(segs).unwrap();
        let l = c(rng.gen_range(-4.0..4.0), rng.gen_range(-4.0..4.0));
        let exact = norm_integral_step(&p, l).unwrap();
        let quad = quadrature_norm(p.segments(), l);
        assert!((exact - quad).norm() < 1e-8 * (1.0 + quad.norm()), "{l}: {exact} vs {quad}");
    }
}

#[test]
fn derivatives_match_central_differences() {
    let mut rng = rng(11);
    let p = two_step();
    for _ in 0..30 {
        let l = c(rng.gen_range(-6.0..6.0), rng.gen_range(-6.0..6.0));
        let v = c(rng.gen_range(-30.0..5.0), rng.gen_range(-5.0..5.0));
        let h = 1e-6 * (1.0 + l.norm());
        for f in [&(|x| char_fn(v, x)) as &dyn Fn(C) -> (C, C), &|x| miss_piecewise(&p, x)] {
            let fd = (f(l + h).0 - f(l - h).0) / (2.0 * h);
            let d = f(l).1;
            assert!((d - fd).norm() <= 1e-6 * (1.0 + d.norm()), "{l}: {d} vs {fd}");
        }
    }
}

#[test]
fn miss_zeros_match_char_fn_zeros_for_random_wells() {
    let mut rng = rng(3);
    let region = Region::from_bounds(-10.0, -10.0, 10.0, 10.0).unwrap();
    let cfg = RootConfig::default();
    let mut compared = 0;
    for _ in 0..20 {
        let v = c(rng.gen_range(-40.0..5.0), rng.gen_range(-10.0..10.0));
        let p = StepPotential::unit_well(v);
        let a = seed_roots(&|l| char_fn(v, l), &region, &cfg);
        let b = seed_roots(&|l| miss_piecewise(&p, l), &region, &cfg);
        // a zero on the box boundary makes the count undefined; skip that well
        let (Ok(a), Ok(b)) = (a, b) else { continue };
        compared += 1;
        assert_eq!(a.len(), b.len(), "v = {v}");
        for (x, y) in a.iter().zip(b.iter()) {
            assert!((x.lambda - y.lambda).norm() < 1e-9, "{} vs {}", x.lambda, y.lambda);
        }
    }
    assert!(compared >= 15, "only {compared} wells compared");
}

#[test]
fn segment_splitting_is_invisible() {
    let one = StepPotential::unit_well(V22);
    let two = StepPotential::new(vec![Segment::new(0.5, V22), Segment::new(0.5, V22)]).unwrap();
    let mut rng = rng(5);
    for _ in 0..20 {
        let l = c(rng.gen_range(-6.0..6.0), rng.gen_range(-6.0..6.0));
        let (a, b) = (miss_piecewise(&one, l).0, miss_piecewise(&two, l).0);
        assert!((a - b).norm() < 1e-12 * (1.0 + a.norm()));
    }
}

#[test]
fn shooting_matches_transfer_matrices() {
    let step = StepPotential::unit_well(V22);
    let sampled = SampledPotential::from_step(&step, 10_000).unwrap();
    let steps = sampled.aligned_steps(10_000);
    let mut rng = rng(13);
    for _ in 0..20 {
        let l = c(rng.gen_range(-6.0..6.0), rng.gen_range(-6.0..6.0));
        let (a, da) = miss_sampled(&sampled, l, steps).unwrap();
        let (b, db) = miss_piecewise(&step, l);
        assert!((a - b).norm() < 1e-6, "{l}: {a} vs {b}");
        assert!((da - db).norm() < 1e-6 * (1.0 + db.norm()));
    }
}

fn smooth_potential() -> SampledPotential {
    let values = (0..11)
        .map(|i| {
            let x = i as f64 / 10.0;
            c(-12.0 * (1.0 - x * x), 2.0 * x)
        })
        .collect();
    SampledPotential::new(1.0, values).unwrap()
}

#[test]
fn rk4_is_fourth_order() {
    let p = smooth_potential();
    let l = c(1.3, 0.7);
    let reference = miss_sampled(&p, l, 10 * 4096).unwrap().0;
    let errors: Vec<f64> = [10, 20, 40, 80]
        .iter()
        .map(|&n| (miss_sampled(&p, l, n).unwrap().0 - reference).norm())
        .collect();
    for w in errors.windows(2) {
        assert!(w[0] / w[1] >= 8.0, "{errors:?}");
    }
}

#[test]
fn lambda_derivative_of_shot_matches_differences() {
    let p = smooth_potential();
    let l = c(-0.8, 1.1);
    let h = 1e-5;
    let r = integrate_phi(&p, l, 2000).unwrap();
    let fd_phi = (integrate_phi(&p, l + h, 2000).unwrap().phi_a - integrate_phi(&p, l - h, 2000).unwrap().phi_a) / (2.0 * h);
    let fd_dphi =
        (integrate_phi(&p, l + h, 2000).unwrap().dphi_a - integrate_phi(&p, l - h, 2000).unwrap().dphi_a) / (2.0 * h);
    assert!((r.dlam_phi_a - fd_phi).norm() < 1e-6 * r.dlam_phi_a.norm());
    assert!((r.dlam_dphi_a - fd_dphi).norm() < 1e-6 * r.dlam_dphi_a.norm());
}

#[test]
fn shot_is_linear_in_initial_slope() {
    let p = smooth_potential();
    let l = c(0.4, -2.0);
    let k = c(2.5, -1.0);
    let a = integrate_phi(&p, l, 200).unwrap();
    let b = integrate_phi_from(&p, l, 200, c(0.0, 0.0), k).unwrap();
    assert!((b.phi_a - a.phi_a * k).norm() < 1e-13 * b.phi_a.norm());
    assert!((b.dlam_dphi_a - a.dlam_dphi_a * k).norm() < 1e-13 * b.dlam_dphi_a.norm());
}

#[test]
fn real_sampled_potentials_are_conjugation_symmetric() {
    let step = StepPotential::unit_well(c(-7.0, 0.0));
    let p = SampledPotential::from_step(&step, 101).unwrap();
    let l = c(0.9, 1.7);
    let a = miss_sampled(&p, l, 1000).unwrap().0;
    let b = miss_sampled(&p, l.conj(), 1000).unwrap().0;
    assert!((a - b.conj()).norm() < 1e-12);
}

#[test]
fn sampled_roots_reproduce_step_roots() {
    let cfg = RootConfig::default();
    let p = SampledPotential::from_step(&StepPotential::unit_well(V22), 1001).unwrap();
    let steps = p.aligned_steps(1000);
    let roots = seed_roots(&|l| miss_sampled(&p, l, steps).unwrap(), &Region::from_bounds(3.0, -1.0, 5.0, 1.0).unwrap(), &cfg).unwrap();
    assert_eq!(roots.len(), 1);
    assert!((kappa_of(roots[0].lambda) - c(-15.42901680, 0.0)).norm() < 1e-5);

    let p = SampledPotential::from_step(&StepPotential::unit_well(c(-0.5, 0.0)), 1001).unwrap();
    let roots = seed_roots(&|l| miss_sampled(&p, l, steps).unwrap(), &Region::from_bounds(-3.0, -3.0, 3.0, 3.0).unwrap(), &cfg).unwrap();
    assert!(roots.iter().any(|r| (r.lambda - c(-1.65056781, 0.0)).norm() < 1e-5), "{roots:?}");
}

#[test]
fn sampled_norm_integral_matches_closed_form() {
    let step = two_step();
    let p = SampledPotential::from_step(&step, 1001).unwrap();
    let l = c(0.7, -0.3);
    let exact = norm_integral_step(&step, l).unwrap();
    let sampled = norm_integral_sampled(&p, l, 10_000).unwrap();
    // linear interpolation smears the interior jump over one cell of width 1e-3
    assert!((sampled - exact).norm() < 5e-3 * exact.norm(), "{sampled} vs {exact}");

    let well = StepPotential::unit_well(c(-7.0, 1.0));
    let p = SampledPotential::from_step(&well, 101).unwrap();
    let exact = norm_integral_step(&well, l).unwrap();
    let sampled = norm_integral_sampled(&p, l, 1000).unwrap();
    assert!((sampled - exact).norm() < 1e-5 * exact.norm(), "{sampled} vs {exact}");
}

#[test]
fn sampled_norm_integral_vanishes_at_collisions() {
    for n in 1..=2 {
        let v = -(tan_theta_root(n).powi(2) + 1.0);
        let p = SampledPotential::from_step(&StepPotential::unit_well(c(v, 0.0)), 101).unwrap();
        let n = norm_integral_sampled(&p, c(-1.0, 0.0), 1000).unwrap();
        assert!(n.norm() < 1e-4, "{n}");
    }
}

#[test]
fn norm_integral_vanishes_exactly_where_derivative_does() {
    for n in 1..=3 {
        let v = c(-(tan_theta_root(n).powi(2) + 1.0), 0.0);
        let p = StepPotential::unit_well(v);
        let (m, dm) = char_fn(v, c(-1.0, 0.0));
        assert!(m.norm() < 1e-12 && dm.norm() < 1e-10);
        assert!(norm_integral_step(&p, c(-1.0, 0.0)).unwrap().norm() < 1e-6);
    }
    // simple zeros of the same well have nonzero norm
    let v = c(-22.0, 0.0);
    for seed in [c(3.93, 0.0), c(-0.109, 0.0), c(-1.87, 0.0)] {
        let l = newton_refine(&|l| char_fn(v, l), seed, &RootConfig::default()).unwrap();
        assert!(char_fn(v, l).1.norm() > 1e-3);
        assert!(norm_integral_step(&StepPotential::unit_well(v), l).unwrap().norm() > 1e-3);
    }
}
