use super::*;
use crate::fields::{climate_field, make_quadratic, ClimateParams, ForcingProfile, Transition};
use crate::integrate::Constant;
use proptest::prelude::*;
use std::sync::OnceLock;

fn riccati(p: f64) -> ScalarField {
    make_quadratic(&ForcingProfile::constant(p))
}

fn unit_pair() -> HyperbolicPair {
    attractor_repeller(&riccati(1.0), (-20.0, 20.0), &PairConfig::default()).unwrap()
}

fn bench_pair() -> &'static HyperbolicPair {
    static P: OnceLock<HyperbolicPair> = OnceLock::new();
    P.get_or_init(|| attractor_repeller(&make_quadratic(&ForcingProfile::bench()), (-120.0, 120.0), &PairConfig::default()).unwrap())
}

#[test]
fn autonomous_equilibria() {
    let p = unit_pair();
    for i in 0..=40 {
        let t = -20.0 + i as f64;
        assert!((p.a(t).unwrap() - 1.0).abs() < 1e-9);
        assert!((p.r(t).unwrap() + 1.0).abs() < 1e-9);
    }
    assert!((p.min_separation() - 2.0).abs() < 1e-8);
    let q = attractor_repeller(&riccati(0.3), (-10.0, 10.0), &PairConfig::default()).unwrap();
    assert!((q.a(1.0).unwrap() - 0.3f64.sqrt()).abs() < 1e-9);
    assert!((q.r(1.0).unwrap() + 0.3f64.sqrt()).abs() < 1e-9);
}

#[test]
fn bench_pair_is_separated() {
    let p = bench_pair();
    assert!(p.min_separation() > 0.1);
    assert!(p.tail_error() < 1e-8);
}

#[test]
fn no_pair_for_negative_constant() {
    let r = attractor_repeller(&riccati(-0.5), (-10.0, 10.0), &PairConfig::default());
    assert!(matches!(r, Err(Error::NoPair(_))));
}

#[test]
fn zero_transition_reproduces_pair() {
    let p = unit_pair();
    let sp = special_solutions(p.field(), &Transition::zero(), Seeding::Pair(&p), (-15.0, 15.0), 0.0, &IntegratorConfig::default()).unwrap();
    assert!((sp.gap - 2.0).abs() < 1e-8);
    assert!((sp.a_at(3.0).unwrap() - 1.0).abs() < 1e-9);
}

#[test]
fn polygonal_special_solution_is_shifted_attractor() {
    let p = bench_pair();
    let g = Transition::polygonal(1.0, 0.5).unwrap();
    let sp = special_solutions(p.field(), &g, Seeding::Pair(p), (-100.0, 100.0), 50.0, &IntegratorConfig::default()).unwrap();
    for i in 0..=99 {
        let t = -100.0 + i as f64;
        assert!((sp.a_at(t).unwrap() - (p.a(t).unwrap() - 0.5)).abs() < 1e-7, "{t}");
    }
    for i in 1..=99 {
        let t = i as f64;
        assert!((sp.r_at(t).unwrap() - (p.r(t).unwrap() + 0.5)).abs() < 1e-7, "{t}");
    }
}

#[test]
fn convex_combinations() {
    let p = unit_pair();
    let b1 = convex_combination(&p, 1.0).unwrap();
    assert!((b1.value_at(2.0).unwrap() - 1.0).abs() < 1e-9);
    let bh = convex_combination(&p, 0.5).unwrap();
    assert!(bh.value_at(2.0).unwrap().abs() < 1e-9);
    let bq = convex_combination(&p, 0.25).unwrap();
    assert!((bq.value_at(0.0).unwrap() + 0.5).abs() < 1e-9);
    let x = p.flow_from_blend(0.25, 0.0, 3f64.ln()).unwrap().state().unwrap();
    assert!((x - 0.5).abs() < 1e-8);
    assert!(convex_combination(&p, 1.5).is_err());
    assert!(convex_combination(&p, -0.1).is_err());
}

#[test]
fn transfer_time_closed_form() {
    let p = unit_pair();
    let grid: Vec<f64> = (0..20).map(|i| -10.0 + 0.5 * i as f64).collect();
    let h = transfer_time(&p, 0.25, 0.75, &grid, 5.0).unwrap();
    assert!((h - 3f64.ln()).abs() < 1e-8, "{h}");
    assert_eq!(transfer_time(&p, 0.4, 0.4, &grid, 5.0).unwrap(), 0.0);
    let wide = transfer_time(&p, 0.2, 0.8, &grid, 5.0).unwrap();
    assert!(wide >= h);
    assert!(transfer_time(&p, 0.25, 0.75, &grid, 0.5).is_err());
}

#[test]
fn entry_exit_for_zero_transition() {
    let p = unit_pair();
    let g = Transition::zero();
    let sp = special_solutions(p.field(), &g, Seeding::Pair(&p), (-15.0, 15.0), 0.0, &IntegratorConfig::default()).unwrap();
    let grid: Vec<f64> = (0..=30).map(|i| -15.0 + i as f64).collect();
    let (t1, t2) = entry_exit_times(&p, &g, &sp, 0.25, 0.75, &grid).unwrap();
    assert_eq!(t1, 15.0);
    assert_eq!(t2, -15.0);
}

#[test]
fn entry_for_polygonal() {
    let p = bench_pair();
    let g = Transition::polygonal(2.0, 1.0).unwrap();
    let sp = special_solutions(p.field(), &g, Seeding::Pair(p), (-100.0, 100.0), 0.0, &IntegratorConfig::default()).unwrap();
    let grid: Vec<f64> = (0..=400).map(|i| -100.0 + 0.5 * i as f64).collect();
    for nu in [0.1, 0.5, 0.9] {
        let (t1, _) = entry_exit_times(p, &g, &sp, nu, nu, &grid).unwrap();
        assert!(t1 >= -0.5);
    }
}

#[test]
fn dichotomy_constant_coefficients() {
    let p = unit_pair();
    let grid: Vec<f64> = (0..=200).map(|i| -10.0 + 0.1 * i as f64).collect();
    let da = dichotomy_estimate(p.field(), p.attractor(), &grid, 5.0).unwrap();
    assert!(da.attractive && (da.beta - 2.0).abs() < 1e-6 && (da.k - 1.0).abs() < 1e-6);
    let dr = dichotomy_estimate(p.field(), p.repeller(), &grid, 5.0).unwrap();
    assert!(!dr.attractive && (dr.beta - 2.0).abs() < 1e-6 && (dr.k - 1.0).abs() < 1e-6);
}

#[test]
fn dichotomy_bench_attractor() {
    let p = bench_pair();
    let grid: Vec<f64> = (0..=1000).map(|i| -100.0 + 0.2 * i as f64).collect();
    let da = dichotomy_estimate(p.field(), p.attractor(), &grid, 20.0).unwrap();
    assert!(da.attractive && da.beta > 0.0 && da.k >= 1.0);
}

#[test]
fn perturbation_radius_example() {
    let d = perturbation_radius(2.0, 1.0, 0.5, 1.0, 3.0, 4.0, 0.1).unwrap();
    assert!((d - 0.05 / 12.0).abs() < 1e-15);
    assert!(perturbation_radius(2.0, 1.0, 1.5, 1.0, 3.0, 4.0, 0.1).is_err());
    let small = perturbation_radius(2.0, 1.0, 0.5, 1.0, 3.0, 4.0, 1e-9).unwrap();
    assert!(small < 1e-10);
}

#[test]
fn lower_solutions() {
    let p = unit_pair();
    let grid: Vec<f64> = (0..=100).map(|i| -5.0 + 0.1 * i as f64).collect();
    let half = convex_combination(&p, 0.5).unwrap();
    let rep = lower_solution_test(p.field(), &half, &grid).unwrap();
    assert!(rep.strict && (rep.margin - 1.0).abs() < 1e-8);
    let top = convex_combination(&p, 1.0).unwrap();
    let rep = lower_solution_test(p.field(), &top, &grid).unwrap();
    assert!(rep.margin.abs() < 1e-8 && !(rep.margin > 1e-8));
}

#[test]
fn cold_constant_is_not_lower_solution() {
    let f = climate_field(ClimateParams::default()).unwrap();
    let grid: Vec<f64> = (0..=400).map(|i| -50.0 + 0.25 * i as f64).collect();
    let rep = lower_solution_test(&f, &Constant(230.0), &grid).unwrap();
    assert!(!rep.strict);
}

#[test]
fn decay_towards_attractor() {
    let p = bench_pair();
    let grid: Vec<f64> = (0..=1000).map(|i| -100.0 + 0.2 * i as f64).collect();
    let d = dichotomy_estimate(p.field(), p.attractor(), &grid, 20.0).unwrap();
    let cfg = IntegratorConfig::default();
    for s in [-80.0, -31.0, 0.0, 17.0] {
        let x0 = p.a(s).unwrap() + 0.7;
        for dt in [1.0, 5.0, 20.0] {
            let x = flow(p.field(), s + dt, s, x0, &cfg).unwrap().state().unwrap();
            let lhs = (p.a(s + dt).unwrap() - x).abs();
            assert!(lhs <= d.k * (-d.beta * dt).exp() * 0.7 + 1e-8);
        }
    }
}

#[test]
fn envelope_for_discrete_transition() {
    let p = bench_pair();
    let h = 0.8;
    let g = Transition::arctan().discretize(h).unwrap();
    let sp = special_solutions(p.field(), &g, Seeding::Pair(p), (-100.0, 100.0), 0.0, &IntegratorConfig::default()).unwrap();
    for i in 0..2000 {
        let t = -60.0 + 0.06 * i as f64;
        if let Some(a) = sp.a_at(t) {
            let gj = g.eval(t);
            assert!(a <= p.a(t).unwrap() + gj + 1e-7, "{t}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn blend_is_strict_lower_solution(k in 1usize..10, s in -60.0..60.0f64, dt in prop::sample::select(vec![0.5, 1.0, 2.0])) {
        let p = bench_pair();
        let nu = k as f64 / 10.0;
        let x = p.flow_from_blend(nu, s, s + dt).unwrap().state().unwrap();
        prop_assert!(x - p.blend(nu, s + dt).unwrap() > 0.0);
    }

    #[test]
    fn uniform_gain(k in 1usize..10, s in -60.0..60.0f64) {
        let p = bench_pair();
        let nu = k as f64 / 10.0;
        let x = p.flow_from_blend(nu, s, s + 1.0).unwrap().state().unwrap();
        prop_assert!(x - p.blend(nu, s + 1.0).unwrap() > 1e-4);
    }
}
