use bura::dataio::{reference_lookup, reference_lookup_stem};
use bura::remez::{compute_bura, RemezConfig, TargetParams};
use bura::ura::{build_0ura, build_1ura, sup_error_on_interval, UraError};
use bura::xnum::ExtReal;

fn bura(q: f64, d: f64, a: f64, k: usize) -> bura::BuraResult {
    let cfg = RemezConfig::default();
    compute_bura(&TargetParams::new(q, d, a, k, cfg.precision).unwrap(), &cfg).unwrap()
}

fn x(v: f64) -> ExtReal {
    ExtReal::from_f64(v, bura::Precision::default())
}

#[test]
fn zero_ura_tables_and_sandwich() {
    let base = bura(0.0, 0.0, 0.25, 3);
    let ura = build_0ura(&base, &x(1.0)).unwrap();
    assert!(ura.poles_negative);
    let target = ura.target();
    let poles = reference_lookup("ura0_poles", &target).unwrap();
    let coeffs = reference_lookup("ura0_coeffs", &target).unwrap();
    assert!(coeffs.get(0).unwrap().matches(&ura.pf.c0));
    for (j, (c, d)) in ura.pf.terms.iter().enumerate() {
        assert!(poles.get(j + 1).unwrap().matches(d), "pole {j}");
        assert!(coeffs.get(j + 1).unwrap().matches(c), "coeff {j}");
    }
    let best = bura(1.0, 0.0, 0.25, 3);
    let ebar = &ura.error_sup;
    assert!(ebar.clone() / 4.0 < best.error_level && best.error_level < *ebar);
}

#[test]
fn zero_shift_reproduces_the_base() {
    let base = bura(0.0, 1e-6, 0.5, 3);
    let ura = build_0ura(&base, &x(0.0)).unwrap();
    assert!(((&ura.error_sup - &base.error_level) / &base.error_level).abs() < 1e-8);
    let one = build_1ura(&base, &x(0.0)).unwrap();
    assert_eq!(one.r, ura.r);
}

#[test]
fn one_ura_from_zero_base_is_the_zero_ura() {
    let base = bura(0.0, 0.0, 0.75, 3);
    let a = build_0ura(&base, &x(200.0)).unwrap();
    let b = build_1ura(&base, &x(200.0)).unwrap();
    assert_eq!(a.r, b.r);
    assert_eq!(a.error_sup, b.error_sup);
}

#[test]
fn one_ura_coefficient_table() {
    let base = bura(200.0, 0.0, 0.5, 3);
    let ura = build_1ura(&base, &x(200.0)).unwrap();
    let coeffs = reference_lookup_stem("ura1_coeffs", "qq22d0a50k3").unwrap();
    assert!(coeffs.get(0).unwrap().matches(&ura.pf.c0));
    for (j, (c, _)) in ura.pf.terms.iter().enumerate() {
        assert!(coeffs.get(j + 1).unwrap().matches(c), "coeff {j}");
    }
}

#[test]
fn base_must_have_zero_q() {
    let base = bura(1.0, 0.0, 0.5, 3);
    assert!(matches!(build_0ura(&base, &x(1.0)), Err(UraError::BaseNotZero(_))));
    assert!(matches!(build_1ura(&base, &x(-1.0)), Err(UraError::NegativeShift(_))));
}

#[test]
fn sup_scan_agrees_with_the_best_error() {
    let b = bura(0.0, 0.0, 0.25, 4);
    let sup = sup_error_on_interval(&b.r, &b.params);
    assert!(((&sup - &b.error_level) / &b.error_level).abs() < 1e-8);
}
