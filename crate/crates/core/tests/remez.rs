use bura::dataio::reference_lookup;
use bura::rational::{check_interlacing, partial_fraction, reciprocal_transform};
use bura::remez::{compute_bura, evaluate_target, RemezConfig, RemezError, TargetParams};
use bura::xnum::ExtReal;

fn run(q: f64, d: f64, a: f64, k: usize) -> bura::BuraResult {
    let cfg = RemezConfig::default();
    compute_bura(&TargetParams::new(q, d, a, k, cfg.precision).unwrap(), &cfg).unwrap()
}

#[test]
fn extreme_set_of_the_smallest_case() {
    let r = run(0.0, 0.0, 0.25, 3);
    let table = reference_lookup("error_table", &r.params).unwrap();
    assert!(table.get(0).unwrap().matches(&r.error_level));
    let pts = reference_lookup("extreme_points", &r.params).unwrap();
    assert_eq!(r.extreme_points.len(), 8);
    for (j, t) in r.extreme_points.iter().enumerate() {
        let want = pts.get(j + 1).unwrap();
        if t.is_zero() {
            assert_eq!(want.to_f64(), Some(0.0));
        } else {
            assert!(want.matches_digits(t, 3), "point {j}: {t}");
        }
    }
    assert_eq!(r.verified, Some(true));
}

#[test]
fn equioscillation_with_alternating_signs() {
    let r = run(100.0, 1e-6, 0.5, 3);
    let e = &r.error_level;
    for w in r.extreme_errors.windows(2) {
        assert!(w[0].signum_i() == -w[1].signum_i());
    }
    for x in &r.extreme_errors {
        assert!((x.abs() - e).abs() <= e * 1e-9);
    }
    // The error at an extreme point is r - g there.
    for (t, x) in r.extreme_points.iter().zip(&r.extreme_errors) {
        let direct = r.r.eval(t) - evaluate_target(&r.params, t);
        assert!((direct - x).abs() <= e * 1e-20);
    }
}

#[test]
fn decomposition_signs_and_tables() {
    let r = run(100.0, 1e-6, 0.5, 3);
    let pf = partial_fraction(&r.r).unwrap();
    assert!(pf.has_bura_signs());
    assert!(check_interlacing(&r.r).unwrap().passed);
    let poles = reference_lookup("bura_poles", &r.params).unwrap();
    let coeffs = reference_lookup("bura_coeffs", &r.params).unwrap();
    assert!(coeffs.get(0).unwrap().matches(&pf.c0));
    for (j, (c, d)) in pf.terms.iter().enumerate() {
        assert!(poles.get(j + 1).unwrap().matches(d));
        assert!(coeffs.get(j + 1).unwrap().matches(c));
    }
    assert!(reciprocal_transform(&pf).unwrap().has_positive_coefficients());
}

#[test]
fn reciprocal_constant_equals_error_at_origin() {
    // r(0) - g(0) = -E at the left end when delta = 0, and r(0) = c~0.
    let r = run(0.0, 0.0, 0.5, 4);
    let rf = reciprocal_transform(&partial_fraction(&r.r).unwrap()).unwrap();
    assert!(((&rf.c0t - &r.error_level) / &r.error_level).abs() <= 1e-8);
}

#[test]
fn invalid_parameters_are_rejected() {
    let p = bura::Precision::default();
    for (q, d, a, k) in
        [(-1.0, 0.0, 0.5, 3), (0.0, 1.0, 0.5, 3), (0.0, 0.0, 1.0, 3), (0.0, 0.0, 0.5, 0), (0.0, 0.0, 0.5, 13)]
    {
        assert!(matches!(TargetParams::new(q, d, a, k, p), Err(RemezError::InvalidParams(_))));
    }
}

#[test]
fn exact_decimal_inputs() {
    let p = TargetParams::new(0.0, 1e-6, 0.25, 3, bura::Precision::default()).unwrap();
    assert_eq!(p.delta, ExtReal::parse("0.000001", p.precision()).unwrap());
}
