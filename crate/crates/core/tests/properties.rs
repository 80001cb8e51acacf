mod common;

use common::*;
use proptest::prelude::*;
use spectrace_core::*;

fn complex(re: std::ops::Range<f64>, im: std::ops::Range<f64>) -> impl Strategy<Value = C> {
    (re, im).prop_map(|(a, b)| c(a, b))
}

fn cubic(l: C) -> (C, C) {
    let (r1, r2, r3) = (c(0.5, 0.3), c(-1.2, -0.7), c(1.4, -1.1));
    let f = (l - r1) * (l - r2) * (l - r3);
    let df = (l - r2) * (l - r3) + (l - r1) * (l - r3) + (l - r1) * (l - r2);
    (f, df)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn winding_count_equals_seeded_roots(
        lo in complex(-8.0..0.0, -8.0..0.0),
        size in complex(1.0..8.0, 1.0..8.0),
        depth in -30.0f64..-1.0,
    ) {
        let region = Region::new(lo, lo + size).unwrap();
        let cfg = RootConfig::default();
        for f in [&(move |l| char_fn(c(depth, 0.0), l)) as &dyn Fn(C) -> (C, C), &cubic] {
            let (Ok(n), Ok(roots)) = (winding_count(&f, &region), seed_roots(&f, &region, &cfg)) else {
                continue;
            };
            let total: i64 = roots.iter().map(|r| r.multiplicity as i64).sum();
            prop_assert_eq!(n, total);
            for r in roots.iter().filter(|r| r.status == RootStatus::Converged) {
                prop_assert!(r.residual <= cfg.newton_tol);
                let again = newton_refine(&f, r.lambda, &cfg).unwrap();
                prop_assert!((again - r.lambda).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn subdivision_is_conservative(
        lo in complex(-8.0..0.0, -8.0..0.0),
        size in complex(1.0..8.0, 1.0..8.0),
        fx in 0.3f64..0.7,
        fy in 0.3f64..0.7,
    ) {
        let region = Region::new(lo, lo + size).unwrap();
        let f = |l| char_fn(c(-22.0, 0.0), l);
        let Ok(parent) = winding_count(&f, &region) else { return Ok(()); };
        let children: Result<Vec<i64>, _> = region.quarters(fx, fy).iter().map(|q| winding_count(&f, q)).collect();
        if let Ok(children) = children {
            prop_assert_eq!(children.iter().sum::<i64>(), parent);
        }
    }

    #[test]
    fn real_wells_have_conjugate_symmetric_char_fn(v in -60.0f64..10.0, l in complex(-8.0..8.0, -8.0..8.0)) {
        let (a, da) = char_fn(c(v, 0.0), l);
        let (b, db) = char_fn(c(v, 0.0), l.conj());
        prop_assert!((a - b.conj()).norm() <= 1e-12 * (1.0 + a.norm()));
        prop_assert!((da - db.conj()).norm() <= 1e-12 * (1.0 + da.norm()));
    }

    #[test]
    fn transfer_matrices_are_unimodular(
        len in 0.01f64..2.0,
        v in complex(-40.0..10.0, -10.0..10.0),
        l in complex(-5.0..5.0, -5.0..5.0),
    ) {
        let m = transfer_step(len, v, l);
        prop_assert!((m.det() - c(1.0, 0.0)).norm() < 1e-10 * (1.0 + m.m12.norm() * m.m21.norm()));
    }

    #[test]
    fn classification_follows_sign_of_real_part(l in complex(-5.0..5.0, -5.0..5.0)) {
        let class = classify(l, 1e-8);
        prop_assert_eq!(class == SpectralClass::Eigenvalue, l.re > 1e-8);
        prop_assert_eq!(class.is_resonance(), l.re < -1e-8);
        prop_assert_eq!(class == SpectralClass::SpectralSingularity, l.re.abs() <= 1e-8);
    }

    #[test]
    fn char_fn_series_switch_is_continuous(theta in 0.0f64..std::f64::consts::TAU) {
        let dir = c(theta.cos(), theta.sin());
        let inner = even_pair(dir * (1e-4 * (1.0 - 1e-12)));
        let outer = even_pair(dir * (1e-4 * (1.0 + 1e-12)));
        prop_assert!((inner.s - outer.s).norm() < 1e-12);
        prop_assert!((inner.c - outer.c).norm() < 1e-12);
    }
}

#[test]
fn conjugate_roots_of_random_real_wells() {
    use rand::Rng;
    let mut rng = rng(21);
    let region = Region::from_bounds(-10.0, -10.37, 10.0, 10.41).unwrap();
    let cfg = RootConfig::default();
    for _ in 0..10 {
        let v = rng.gen_range(-80.0..-0.5);
        let roots = seed_roots(&|l| char_fn(c(v, 0.0), l), &region, &cfg).unwrap();
        for r in roots.iter().filter(|r| r.lambda.im.abs() > 1e-6) {
            assert!(
                roots.iter().any(|q| (q.lambda - r.lambda.conj()).norm() < 1e-8),
                "v = {v}: {} has no partner",
                r.lambda
            );
        }
    }
}
