use super::*;
use crate::bifurcation::{lambda_star, ClassifyConfig};
use crate::fields::{make_quadratic, ForcingProfile};
use proptest::prelude::*;

fn unit_field() -> ScalarField {
    make_quadratic(&ForcingProfile::constant(1.0))
}

fn unit_pair() -> HyperbolicPair {
    attractor_repeller(&unit_field(), (-30.0, 30.0), &PairConfig::default()).unwrap()
}

fn unit_instance(gamma: &Transition, search: (f64, f64)) -> Instance {
    Instance::prepare(&unit_field(), gamma, search, 10.0, &PairConfig::default()).unwrap()
}

#[test]
fn slack_sign_convention() {
    assert_eq!(Inequality::geq(3.0, 1.0).slack, 2.0);
    assert_eq!(Inequality::leq(3.0, 1.0).slack, -2.0);
    assert_eq!(Inequality::geq(f64::NAN, 1.0).slack, f64::NEG_INFINITY);
}

#[test]
fn settle_requires_margin_above_budget() {
    let mut c = Certificate::new("x", 0.5);
    c.inequalities = vec![Inequality::geq(1.4, 1.0), Inequality::geq(3.0, 1.0)];
    let c = c.settle(CertVerdict::Tracking);
    assert_eq!(c.verdict, CertVerdict::NotApplicable);
    assert!((c.margin - 0.4).abs() < 1e-15);
    let mut d = Certificate::new("x", 0.3);
    d.inequalities = vec![Inequality::geq(1.4, 1.0)];
    assert_eq!(d.settle(CertVerdict::Tracking).verdict, CertVerdict::Tracking);
}

#[test]
fn consistency_rejects_mixed_bundles() {
    let mut a = Certificate::new("a", 0.0);
    a.verdict = CertVerdict::Tracking;
    let mut b = Certificate::new("b", 0.0);
    b.verdict = CertVerdict::TippingNoBounded;
    assert!(check_consistency(&[a.clone(), b]).is_err());
    assert!(check_consistency(&[a]).is_ok());
}

#[test]
fn nonincreasing_transition_tracks_for_every_step() {
    let f = make_quadratic(&ForcingProfile::bench());
    for h in [0.5, 2.0] {
        let g = Transition::arctan().negate().discretize(h).unwrap();
        let inst = Instance::prepare(&f, &g, (-30.0, 30.0), 40.0, &PairConfig::default()).unwrap();
        let pw = inst.piecewise().unwrap();
        let c = check_piecewise_tracking(&pw, &TrackingStrategy::Nonincreasing).unwrap();
        assert_eq!(c.criterion, "Cor5.5");
        assert_eq!(c.verdict, CertVerdict::Tracking, "h = {h}: {c:?}");
        assert_eq!(c.parameters["nu"], 0.5);
    }
}

#[test]
fn uniform_nu_on_slow_polygonal() {
    // h = 1.2 >= ln 3 and every jump is at most c d h = 0.48 < (1/2) 2.
    let g = Transition::polygonal(1.0, 0.4).unwrap().discretize(1.2).unwrap();
    let inst = unit_instance(&g, (-12.0, 12.0));
    let pw = inst.piecewise().unwrap();
    let c = check_piecewise_tracking(&pw, &TrackingStrategy::UniformNu { nu1: 0.25, nu2: 0.75 }).unwrap();
    assert_eq!(c.criterion, "Cor5.6");
    assert_eq!(c.verdict, CertVerdict::Tracking, "{c:?}");
    let h_nu = c.parameters["h_nu"].as_f64().unwrap();
    assert!((h_nu - 3f64.ln()).abs() < 1e-3, "h_nu = {h_nu}");
}

#[test]
fn uniform_nu_needs_long_steps() {
    let g = Transition::polygonal(1.0, 0.4).unwrap().discretize(0.5).unwrap();
    let inst = unit_instance(&g, (-12.0, 12.0));
    let pw = inst.piecewise().unwrap();
    let c = check_piecewise_tracking(&pw, &TrackingStrategy::UniformNu { nu1: 0.25, nu2: 0.75 }).unwrap();
    assert_eq!(c.verdict, CertVerdict::NotApplicable);
}

#[test]
fn one_step_tipping_for_a_big_fast_jump() {
    // Gamma(0.5) - Gamma(0) = 2.5 >= ã - r̃ = 2.
    let g = Transition::polygonal(10.0, 2.5).unwrap().discretize(0.5).unwrap();
    let inst = unit_instance(&g, (-10.0, 10.0));
    let pw = inst.piecewise().unwrap();
    let c = check_piecewise_tipping(&pw, &TippingStrategy::OneStep).unwrap();
    assert_eq!(c.criterion, "Thm5.11-i");
    assert_eq!(c.verdict, CertVerdict::TippingNoBounded);
    assert!((c.margin - 0.5).abs() < 1e-6, "margin {}", c.margin);
    let bundle = certify_piecewise(&inst).unwrap();
    assert!(bundle_verdict(&bundle).is_tipping());
}

#[test]
fn no_tipping_certificate_on_a_tracking_instance() {
    let g = Transition::polygonal(0.1, 0.4).unwrap().discretize(1.0).unwrap();
    let inst = unit_instance(&g, (-20.0, 20.0));
    let pw = inst.piecewise().unwrap();
    for s in [
        TippingStrategy::OneStep,
        TippingStrategy::TwoStepNu { nus: nu_grid(0.1, 0.9, 9) },
        TippingStrategy::TwoStepShift,
        TippingStrategy::SeveralSteps,
    ] {
        let c = check_piecewise_tipping(&pw, &s).unwrap();
        assert_eq!(c.verdict, CertVerdict::NotApplicable, "{s:?}: {c:?}");
    }
    let bundle = certify_piecewise(&inst).unwrap();
    assert_eq!(bundle_verdict(&bundle), CertVerdict::Tracking);
}

#[test]
fn tipping_rejects_decreasing_transitions() {
    let g = Transition::polygonal(1.0, 1.0).unwrap().negate().discretize(0.5).unwrap();
    let inst = unit_instance(&g, (-10.0, 10.0));
    let pw = inst.piecewise().unwrap();
    assert!(matches!(check_piecewise_tipping(&pw, &TippingStrategy::OneStep), Err(Error::Hypothesis(_))));
}

#[test]
fn one_step_matches_two_point_chain() {
    for (c, d, h) in [(10.0, 2.5, 0.5), (4.0, 3.0, 0.5), (1.0, 0.4, 1.0)] {
        let g = Transition::polygonal(c, d).unwrap().discretize(h).unwrap();
        let inst = unit_instance(&g, (-10.0, 10.0));
        let pw = inst.piecewise().unwrap();
        let one = check_piecewise_tipping(&pw, &TippingStrategy::OneStep).unwrap();
        let j0 = one.parameters["j0"].as_i64().unwrap();
        let chain = check_piecewise_tipping(&pw, &TippingStrategy::Chain { j0, nus: vec![1.0, 0.0] }).unwrap();
        assert_eq!(one.fired(), chain.fired());
        assert!((one.margin - chain.margin).abs() < 1e-9, "{} vs {}", one.margin, chain.margin);
    }
}

#[test]
fn only_several_steps_integrates_the_transition() {
    let g = Transition::polygonal(2.0, 1.2).unwrap().discretize(0.5).unwrap();
    let inst = unit_instance(&g, (-10.0, 10.0));
    let pw = inst.piecewise().unwrap();
    let tracking = [
        TrackingStrategy::UniformNu { nu1: 0.25, nu2: 0.75 },
        TrackingStrategy::Remark57 { nus: nu_grid(0.05, 0.45, 5) },
        TrackingStrategy::TwoPoint,
        TrackingStrategy::Chain(NuSchedule::Constant(0.5)),
        TrackingStrategy::Chain(NuSchedule::Ramp { alpha: 0.25 }),
    ];
    for s in &tracking {
        assert_eq!(check_piecewise_tracking(&pw, s).unwrap().transition_solves, 0, "{s:?}");
    }
    let tipping = [
        (TippingStrategy::OneStep, 0),
        (TippingStrategy::TwoStepNu { nus: vec![0.5] }, 0),
        (TippingStrategy::TwoStepShift, 0),
        (TippingStrategy::Chain { j0: 0, nus: vec![1.0, 0.5, 0.0] }, 0),
        (TippingStrategy::SeveralSteps, 1),
    ];
    for (s, n) in &tipping {
        assert_eq!(check_piecewise_tipping(&pw, s).unwrap().transition_solves, *n, "{s:?}");
    }
}

#[test]
fn half_criterion_agrees_with_polygonal_rule() {
    // On [-1/c, 1/c]: (1/4) 4 - c d against (1/2c) 4 - 2d.
    let pair = unit_pair();
    for (c, d) in [(1.0, 0.8), (1.0, 1.2), (2.0, 0.45), (0.5, 2.2)] {
        let g = Transition::polygonal(c, d).unwrap();
        let anchors = Anchors::compute(&pair, &g, (-20.0, 20.0), pair.integrator()).unwrap();
        // Open interval: the corners of the polygon carry no derivative.
        let e = 1e-3 / c;
        let th = check_continuous_tracking_on(&pair, &g, &anchors, None, -1.0 / c + e, 1.0 / c - e).unwrap();
        let poly = polygonal_certificates(&pair, c, d).unwrap();
        let p1 = poly.iter().find(|x| x.criterion == "Thm6.12-i").unwrap();
        assert_eq!(th.criterion, "Thm6.8");
        assert_eq!(th.fired(), c * d < 1.0, "(c, d) = ({c}, {d}): {}", th.margin);
        assert_eq!(p1.fired(), th.fired());
        let pointwise = th.inequalities[2..].iter().map(|q| q.slack).fold(f64::INFINITY, f64::min);
        assert!((pointwise - (1.0 - c * d)).abs() < 1e-6);
        assert!((p1.margin - 2.0 * (1.0 - c * d) / c).abs() < 1e-6);
    }
}

#[test]
fn slope_bound_for_decreasing_transition() {
    let f = make_quadratic(&ForcingProfile::bench());
    let lam0 = lambda_star(&f, &Transition::zero(), 1e-4, &ClassifyConfig::default()).unwrap();
    assert!(lam0.bracket.1 < 0.0);
    for c in [0.2, 1.0, 5.0] {
        let g = Transition::arctan().rescale_time(c).unwrap().negate();
        let cert = check_slope_bound(&lam0, &g, (-30.0, 30.0)).unwrap();
        assert_eq!(cert.criterion, "Prop6.5");
        assert_eq!(cert.verdict, CertVerdict::Tracking, "c = {c}");
    }
    let steep = Transition::arctan().rescale_time(5.0).unwrap();
    assert!(!check_slope_bound(&lam0, &steep, (-30.0, 30.0)).unwrap().fired());
}

#[test]
fn continuous_tipping_for_large_polygonal_size() {
    let pair = unit_pair();
    let tips =
        |d: f64| check_continuous_tipping(&pair, &Transition::polygonal(1.0, d).unwrap(), -0.999, 0.999).unwrap();
    let c = tips(3.0);
    assert_eq!(c.verdict, CertVerdict::TippingNoBounded);
    assert!((c.margin - 1.0).abs() < 2e-3, "{}", c.margin);
    assert!(!tips(1.9).fired());
}

#[test]
fn continuous_tipping_never_fires_on_flat_stretch() {
    let pair = unit_pair();
    let g = Transition::polygonal(1.0, 3.0).unwrap();
    assert!(!check_continuous_tipping(&pair, &g, 2.0, 5.0).unwrap().fired());
}

#[test]
fn continuous_tipping_rejects_decreasing_transitions() {
    let pair = unit_pair();
    let g = Transition::arctan().negate();
    assert!(matches!(check_continuous_tipping(&pair, &g, -1.0, 1.0), Err(Error::Hypothesis(_))));
}

#[test]
fn polygonal_rules_with_constant_separation() {
    let pair = unit_pair();
    for c in [0.2, 1.0, 4.0] {
        let certs = polygonal_certificates(&pair, c, 0.9).unwrap();
        let ii = certs.iter().find(|x| x.criterion == "Thm6.12-ii").unwrap();
        assert_eq!(ii.verdict, CertVerdict::Tracking, "c = {c}");
        let d = 1.0 + 1.0 / c + 0.05;
        let certs = polygonal_certificates(&pair, c, d).unwrap();
        let tip = certs.iter().find(|x| x.criterion == "Prop6.13").unwrap();
        assert_eq!(tip.verdict, CertVerdict::TippingNoBounded, "c = {c}");
        assert!(check_polygonal(&pair, c, d).unwrap().verdict.is_tipping());
    }
}

#[test]
fn step_limit_rule() {
    let pair = unit_pair();
    let tr = check_polygonal(&pair, f64::INFINITY, 0.8).unwrap();
    assert_eq!((tr.criterion.as_str(), tr.verdict), ("step-limit", CertVerdict::Tracking));
    let tp = check_polygonal(&pair, f64::INFINITY, 1.2).unwrap();
    assert_eq!(tp.verdict, CertVerdict::TippingNoBounded);
}

#[test]
fn rate_bound_from_separation_window() {
    let f = make_quadratic(&ForcingProfile::bench());
    let pair = attractor_repeller(&f, (-40.0, 40.0), &PairConfig::default()).unwrap();
    let t_d = 2.0;
    let inf = (0..=400).map(|i| pair.separation(-t_d + i as f64 * 0.01).unwrap()).fold(f64::INFINITY, f64::min);
    let d = 0.45 * inf;
    for c in [1.0 / t_d, 1.0, 3.0] {
        let cert = polygonal_certificates(&pair, c, d).unwrap().into_iter().find(|x| x.criterion == "Cor6.14-i").unwrap();
        assert_eq!(cert.verdict, CertVerdict::Tracking, "c = {c}");
        let c_min = cert.parameters["c_min"].as_f64().unwrap();
        assert!(c_min <= 1.0 / t_d + 1e-12);
    }
}

#[test]
fn numerical_anchors_track_the_frozen_pair() {
    let pair = unit_pair();
    let g = Transition::polygonal(0.5, 0.5).unwrap();
    let an = Anchors::compute(&pair, &g, (-20.0, 20.0), pair.integrator()).unwrap();
    assert!(an.error() < 1e-6);
    assert!((an.a_offset(-15.0).unwrap() - 1.0).abs() < 1e-6);
    assert!((an.r_offset(15.0).unwrap() + 1.0).abs() < 1e-6);
    assert!(Anchors::compute(&pair, &g, (-40.0, 20.0), pair.integrator()).is_err());
}

#[test]
fn search_width_floor() {
    assert_eq!(search_half_width(0.5), 160.0);
    assert_eq!(search_half_width(6.0), 30.0);
    assert_eq!(search_half_width(f64::INFINITY), 30.0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn polygonal_margin_nonincreasing_in_size(c in 0.2f64..5.0, d1 in 0.0f64..3.0, dd in 0.0f64..1.0) {
        let pair = bench_pair();
        let a = polygonal_certificates(pair, c, d1).unwrap();
        let b = polygonal_certificates(pair, c, d1 + dd).unwrap();
        for (x, y) in a.iter().zip(&b) {
            if x.verdict == CertVerdict::Tracking || x.criterion.starts_with("Thm6.12") || x.criterion == "Cor6.14-i" {
                prop_assert!(y.margin <= x.margin + 1e-12, "{}: {} -> {}", x.criterion, x.margin, y.margin);
            }
        }
    }
}

fn bench_pair() -> &'static HyperbolicPair {
    use std::sync::OnceLock;
    static PAIR: OnceLock<HyperbolicPair> = OnceLock::new();
    PAIR.get_or_init(|| {
        let f = make_quadratic(&ForcingProfile::bench());
        attractor_repeller(&f, (-20.0, 20.0), &PairConfig::default()).unwrap()
    })
}
