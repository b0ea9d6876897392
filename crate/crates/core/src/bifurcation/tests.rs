use super::*;
use crate::fields::{make_quadratic, ForcingProfile, Transition};
use crate::pullback::{attractor_repeller, special_solutions, PairConfig};

fn riccati(p: f64) -> ScalarField {
    make_quadratic(&ForcingProfile::constant(p))
}

#[test]
fn zero_transition_tracks() {
    let f = riccati(1.0);
    let v = classify(&f, &Transition::zero(), None, &ClassifyConfig::default()).unwrap();
    assert_eq!(v.case, Case::Tracking);
    assert!((v.gap - 2.0).abs() < 1e-8);
}

#[test]
fn zero_transition_with_pair() {
    let f = riccati(1.0);
    let pair = attractor_repeller(&f, (-50.0, 50.0), &PairConfig::default()).unwrap();
    let v = classify(&f, &Transition::zero(), Some(&pair), &ClassifyConfig::default()).unwrap();
    assert_eq!(v.case, Case::Tracking);
    assert!((v.gap - 2.0).abs() < 1e-8);
}

#[test]
fn large_step_tips() {
    let f = riccati(1.0);
    let v = classify(&f, &Transition::step(2.0), None, &ClassifyConfig::default()).unwrap();
    assert_eq!(v.case, Case::Tipping);
    let v = classify(&f, &Transition::step(0.5), None, &ClassifyConfig::default()).unwrap();
    assert_eq!(v.case, Case::Tracking);
}

#[test]
fn critical_value_of_pure_square() {
    let cfg = ClassifyConfig { half_span: 200.0, burn_in: 200.0, ..Default::default() };
    let tol = 1e-4;
    let l = lambda_star(&riccati(0.0), &Transition::zero(), tol, &cfg).unwrap();
    assert!(l.value.abs() <= tol, "{l:?}");
    assert!(l.bracket.1 - l.bracket.0 <= 2.0 * tol);
}

#[test]
fn critical_value_of_constant_forcing() {
    // x' = -x^2 + 0.7 + lambda has bounded solutions iff lambda >= -0.7
    let l = lambda_star(&riccati(0.7), &Transition::zero(), 1e-6, &ClassifyConfig::default()).unwrap();
    assert!((l.value + 0.7).abs() < 2e-3, "{l:?}");
}

#[test]
fn bracket_certificate() {
    let f = riccati(1.0);
    let g = Transition::step(0.8);
    let cfg = ClassifyConfig::default();
    let l = lambda_star(&f, &g, 1e-4, &cfg).unwrap();
    assert_eq!(classify(&f.shift_parameter(l.bracket.0), &g, None, &cfg).unwrap().case, Case::Tipping);
    assert_eq!(classify(&f.shift_parameter(l.bracket.1), &g, None, &cfg).unwrap().case, Case::Tracking);
}

#[test]
fn shift_identity() {
    let f = make_quadratic(&ForcingProfile::bench());
    let g = Transition::arctan().rescale_time(2.0).unwrap();
    let tol = 1e-5;
    let cfg = ClassifyConfig::default();
    let base = lambda_star(&f, &g, tol, &cfg).unwrap();
    for l0 in [-0.7, 0.35] {
        let s = lambda_star(&f.shift_parameter(l0), &g, tol, &cfg).unwrap();
        assert!((s.value - base.value + l0).abs() <= 2.0 * tol, "{l0}: {s:?} vs {base:?}");
    }
}

#[test]
fn step_size_flip_near_one() {
    let f = riccati(1.0);
    let rows = scan_size(&f, &Transition::step(1.0), 1.0, &[0.5, 0.9, 1.1, 1.5], 1e-4, &ClassifyConfig::default());
    let signs: Vec<&str> = rows.iter().map(|r| r.verdict.as_str()).collect();
    assert_eq!(signs, vec!["tracking", "tracking", "tipping", "tipping"]);
}

#[test]
fn ordering_of_shifted_pairs() {
    let f = make_quadratic(&ForcingProfile::bench());
    let cfg = ClassifyConfig::default();
    let ls = lambda_star(&f, &Transition::zero(), 1e-5, &cfg).unwrap().value;
    let pc = PairConfig::default();
    let p1 = attractor_repeller(&f.shift_parameter(ls + 0.1), (-30.0, 30.0), &pc).unwrap();
    let p2 = attractor_repeller(&f.shift_parameter(ls + 0.3), (-30.0, 30.0), &pc).unwrap();
    for i in 0..100 {
        let t = -29.0 + 0.58 * i as f64;
        let (a1, r1, a2, r2) = (p1.a(t).unwrap(), p1.r(t).unwrap(), p2.a(t).unwrap(), p2.r(t).unwrap());
        assert!(r2 < r1 && r1 <= a1 && a1 < a2);
    }
}

#[test]
fn pair_seeded_matches_coercive() {
    let f = make_quadratic(&ForcingProfile::bench());
    let pair = attractor_repeller(&f, (-100.0, 100.0), &PairConfig::default()).unwrap();
    let g = Transition::arctan().rescale_time(0.5).unwrap();
    let cfg = ClassifyConfig::default();
    let a = classify(&f, &g, None, &cfg).unwrap();
    let b = classify(&f, &g, Some(&pair), &cfg).unwrap();
    assert_eq!(a.case, b.case);
    if a.gap.is_finite() {
        assert!((a.gap - b.gap).abs() < 1e-6);
    }
    let sp = special_solutions(&f, &g, crate::pullback::Seeding::Pair(&pair), (-40.0, 40.0), 40.0, &cfg.integrator).unwrap();
    if a.gap.is_finite() {
        assert!((sp.gap - a.gap).abs() < 1e-6);
    }
}

#[test]
fn csv_layout() {
    let rows = vec![ScanRow { c: 1.0, param: 0.5, lambda: Some(LambdaStar { value: -0.25, bracket: (-0.26, -0.24), tol: 0.01, iterations: 3 }), verdict: "tracking".into() }];
    let csv = to_csv(&rows, "h");
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), "c,h,lambda_star,bracket_lo,bracket_hi,verdict");
    assert_eq!(lines.next().unwrap(), "1.0000000000000000e0,5.0000000000000000e-1,-2.5000000000000000e-1,-2.6000000000000001e-1,-2.3999999999999999e-1,tracking");
}

#[test]
fn constant_phase_curve() {
    let p = ForcingProfile::constant(1.0);
    let scan = scan_phase(&p, &Transition::arctan(), 1.0, &[-3.0, 0.0, 3.0], 0.1, 1e-4, &ClassifyConfig::default());
    let v: Vec<f64> = scan.rows.iter().map(|r| r.value().unwrap()).collect();
    assert!((v[0] - v[1]).abs() < 1e-3 && (v[1] - v[2]).abs() < 1e-3);
}
