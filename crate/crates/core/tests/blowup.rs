use std::f64::consts::PI;
use tm_radial::inequalities::at_quadratic_bound;
use tm_radial::optimizer::{blowup_scan_log, plateau_term, scaled_counterexample, vanishing_probe, ConstraintSet};
use tm_radial::FOUR_PI;

const TOL: f64 = 1e-10;

#[test]
fn critical_functional_grows_far_out() {
    let log_ns = [1e3, 1e4, 1e6, 1e8];
    let rows = blowup_scan_log(0.0, 1.0, &[FOUR_PI], &log_ns, TOL).unwrap();
    for w in rows.windows(2) {
        assert!(w[1].lower_bound > w[0].lower_bound, "{:?}", w);
    }
    // J itself still dips around log n = 1e3 before the plateau takes over
    for w in rows[1..].windows(2) {
        assert!(w[1].j_beta > w[0].j_beta, "{:?}", w);
    }
    assert!(rows[3].j_beta > 20.0 * rows[1].j_beta);
    for r in &rows {
        assert!(r.j_beta >= r.lower_bound - r.quad_error, "{:?}", r);
    }
    // the plateau alone is π R² (1/√log n - 1/n²) with R² = log n / (log log n)²
    let ln = 1e8f64;
    let plateau = PI * ln / ln.ln().powi(2) / ln.sqrt();
    // exponents near 1e8 cancel, costing about 1e8 ε
    assert!((rows[3].lower_bound / plateau - 1.0).abs() < 1e-7);
}

#[test]
fn subcritical_scans_stay_below_adachi_bound() {
    let log_ns = [10.0, 1e2, 1e4, 1e6, 1e8];
    for (delta, beta) in [(0.0, 2.0 * PI), (0.5, FOUR_PI)] {
        let rows = blowup_scan_log(delta, 1.0, &[beta], &log_ns, TOL).unwrap();
        let beta_eff = beta * (1.0 - delta) * (1.0 - delta);
        let cap = at_quadratic_bound(beta_eff).unwrap();
        for r in rows {
            let u = scaled_counterexample(delta, 1.0, r.log_n).unwrap();
            assert!(r.j_beta <= cap * u.l2_norm_sq() / (1.0 - delta).powi(2), "{:?}", r);
        }
    }
}

#[test]
fn plateau_term_of_a_constant() {
    let u = tm_radial::RadialProfile::constant(0.5, 3.0).unwrap();
    let expected = 3.0 * ((FOUR_PI * 0.25).exp() - 1.0);
    assert!((plateau_term(&u, FOUR_PI) / expected - 1.0).abs() < 1e-14);
}

#[test]
fn probe_tends_to_vanishing_level() {
    let c = ConstraintSet::Reduced { delta: 0.2, k: 1.5 };
    let rows = vanishing_probe(&c, 8.0, &[1.0, 1e-1, 1e-2, 1e-3], TOL).unwrap();
    for w in rows.windows(2) {
        assert!(w[1].remainder < w[0].remainder);
    }
    let last = rows.last().unwrap();
    assert!((last.l2_sq - 2.25).abs() < 1e-12);
    assert!((last.j_beta - last.vanishing_level).abs() < 1e-4 * last.vanishing_level);
    assert!(last.j_beta > last.vanishing_level);
}
