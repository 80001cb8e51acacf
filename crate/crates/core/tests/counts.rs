mod common;

use common::*;
use spectrace_core::*;

/// Real zeros of the unit well of depth `k_sq`, split by sign.
fn real_root_counts(k_sq: f64) -> (usize, usize) {
    let f = |l: C| char_fn(c(-k_sq, 0.0), l);
    // thin strip around the real axis, wide enough for every real zero of these depths
    let region = Region::from_bounds(-30.0, -0.37, 30.0, 0.41).unwrap();
    let roots = seed_roots(&f, &region, &RootConfig::default()).unwrap();
    let real: Vec<C> = roots.iter().map(|r| r.lambda).filter(|l| l.im.abs() < 1e-6).collect();
    (
        real.iter().filter(|l| l.re > 0.0).count(),
        real.iter().filter(|l| l.re < 0.0).count(),
    )
}

#[test]
fn closed_form_counts_match_root_finder() {
    for k_sq in [5.0, 10.0, 22.0, 25.0, 30.0, 60.0, 100.0] {
        let (eig, anti) = real_root_counts(k_sq);
        let counts = well_counts(k_sq);
        assert_eq!(counts.n_eigen as usize, eig, "k² = {k_sq}");
        assert_eq!(counts.n_antibound.exact().map(|n| n as usize), Some(anti), "k² = {k_sq}");
    }
}

#[test]
fn shallow_well_antibound_count_is_open() {
    assert_eq!(antibound_count_exact(1.0), AntiboundCount::Unknown);
    let (eig, anti) = real_root_counts(1.0);
    assert_eq!(eig, 0);
    // the root finder still sees the single antibound state
    assert_eq!(anti, 1);
}

#[test]
fn thresholds_are_consistent() {
    for n in 1..6 {
        let theta = tan_theta_root(n);
        assert!((theta.tan() - theta).abs() < 1e-8 * theta);
        // just below the collision depth there are n − 1 antibound states, at it n + 1
        let k = theta * theta + 1.0;
        assert_eq!(antibound_count_exact(k - 1e-6), AntiboundCount::Exact(eigenvalue_count_exact(k) - 1));
        assert_eq!(antibound_count_exact(k), AntiboundCount::Exact(eigenvalue_count_exact(k) + 1));
    }
}

#[test]
fn deep_well_spectrum() {
    let f = |l: C| char_fn(c(-22.0, 0.0), l);
    let cfg = RootConfig::default();
    let expected = [
        c(-15.42901680, 0.0),
        c(-3.48239885, 0.0),
        c(-0.01187978, 0.0),
        c(35.73924059, 16.82276560),
        c(35.73924059, -16.82276560),
    ];
    let roots = seed_roots(&f, &Region::from_bounds(-6.0, -8.0, 8.0, 8.0).unwrap(), &cfg).unwrap();
    assert_eq!(roots.len(), 5);
    for k in expected {
        assert!(roots.iter().any(|r| (kappa_of(r.lambda) - k).norm() < 1e-6), "{k} missing");
    }
    // the taller box also holds further resonance pairs
    let roots = seed_roots(&f, &Region::from_bounds(-6.0, -20.0, 8.0, 20.0).unwrap(), &cfg).unwrap();
    assert_eq!(roots.len(), 13);
    for k in expected {
        assert!(roots.iter().any(|r| (kappa_of(r.lambda) - k).norm() < 1e-6));
    }
}

#[test]
fn free_well_has_no_zeros() {
    let f = |l: C| char_fn(c(0.0, 0.0), l);
    let r = Region::from_bounds(-10.0, -10.0, 10.0, 10.0).unwrap();
    assert_eq!(winding_count(&f, &r).unwrap(), 0);
    assert!(seed_roots(&f, &r, &RootConfig::default()).unwrap().is_empty());
}

#[test]
fn frank_and_bargmann_bounds() {
    let (_, constant) = frank_constant();
    assert!((constant - 2.38436418).abs() < 1e-6);
    for v in [1.0, 5.0, 22.0, 100.0] {
        let b = bounds_report(v);
        assert_eq!(b.bargmann, v / 2.0);
        assert_eq!(b.count_formula, eigenvalue_count_exact(v));
        assert!(b.frank > 0.0);
    }
}
