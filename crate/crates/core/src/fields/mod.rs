//! Scalar nonautonomous fields `x' = f(t, x)` and the model library.

mod climate;
mod forcing;
mod hopfield;
mod knots;
mod registry;
mod transition;

use std::fmt;
use std::sync::Arc;

pub use climate::{climate_constants, climate_field, ClimateMode, ClimateParams, ClimateThresholds};
pub use forcing::{ForcingProfile, TimeFn};
pub use hopfield::{hopfield_field, hopfield_transition};
pub use knots::{lattice_index, Knots};
pub use registry::{build_model, model_ids, ModelSpec, Problem};
pub use transition::{
    discretize_transition, polygonal_transition, step_transition, Monotonicity, Transition, DEFAULT_TAIL_TOL,
};

pub type StateFn = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

/// A scalar field together with the bounds the solvers rely on.
#[derive(Clone)]
pub struct ScalarField {
    name: String,
    rhs: StateFn,
    rhs_dx: StateFn,
    knots: Knots,
    coercivity_radius: f64,
    m_bound: f64,
    coercive: bool,
    lower_seed: f64,
    upper_seed: f64,
    escape_lower: f64,
    escape_upper: f64,
    active_window: Option<(f64, f64)>,
}

impl fmt::Debug for ScalarField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ScalarField")
            .field("name", &self.name)
            .field("coercivity_radius", &self.coercivity_radius)
            .field("seeds", &(self.lower_seed, self.upper_seed))
            .field("escape", &(self.escape_lower, self.escape_upper))
            .finish()
    }
}

impl ScalarField {
    /// New field with radius `rho`; seeds default to `+-(rho + 1)` and
    /// escape thresholds to `+-10 rho`.
    pub fn new(
        name: impl Into<String>,
        rho: f64,
        rhs: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
        rhs_dx: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        ScalarField {
            name: name.into(),
            rhs: Arc::new(rhs),
            rhs_dx: Arc::new(rhs_dx),
            knots: Knots::none(),
            coercivity_radius: rho,
            m_bound: f64::NAN,
            coercive: true,
            lower_seed: -(rho + 1.0),
            upper_seed: rho + 1.0,
            escape_lower: -10.0 * rho.max(1.0),
            escape_upper: 10.0 * rho.max(1.0),
            active_window: None,
        }
    }

    pub fn with_knots(mut self, knots: Knots) -> Self {
        self.knots = knots;
        self
    }

    pub fn with_m_bound(mut self, m: f64) -> Self {
        self.m_bound = m;
        self
    }

    pub fn with_seeds(mut self, lower: f64, upper: f64) -> Self {
        self.lower_seed = lower;
        self.upper_seed = upper;
        self
    }

    pub fn with_escape(mut self, lower: f64, upper: f64) -> Self {
        self.escape_lower = lower;
        self.escape_upper = upper;
        self
    }

    pub fn with_coercive(mut self, coercive: bool) -> Self {
        self.coercive = coercive;
        self
    }

    pub fn with_active_window(mut self, w: (f64, f64)) -> Self {
        self.active_window = Some(w);
        self
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    #[inline]
    pub fn eval(&self, t: f64, x: f64) -> f64 {
        (self.rhs)(t, x)
    }

    #[inline]
    pub fn eval_dx(&self, t: f64, x: f64) -> f64 {
        (self.rhs_dx)(t, x)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn knots(&self) -> &Knots {
        &self.knots
    }

    pub fn coercivity_radius(&self) -> f64 {
        self.coercivity_radius
    }

    pub fn m_bound(&self) -> f64 {
        self.m_bound
    }

    pub fn is_coercive(&self) -> bool {
        self.coercive
    }

    pub fn lower_seed(&self) -> f64 {
        self.lower_seed
    }

    pub fn upper_seed(&self) -> f64 {
        self.upper_seed
    }

    pub fn escape_lower(&self) -> f64 {
        self.escape_lower
    }

    pub fn escape_upper(&self) -> f64 {
        self.escape_upper
    }

    pub fn active_window(&self) -> Option<(f64, f64)> {
        self.active_window
    }

    /// `(t, x) -> f(t, x) + lambda`.
    pub fn shift_parameter(&self, lambda: f64) -> Self {
        let f = self.rhs.clone();
        let pad = lambda.abs();
        ScalarField {
            name: format!("{}+({lambda})", self.name),
            rhs: Arc::new(move |t, x| f(t, x) + lambda),
            coercivity_radius: self.coercivity_radius + pad,
            m_bound: self.m_bound + pad,
            lower_seed: self.lower_seed - pad,
            upper_seed: self.upper_seed + pad,
            escape_lower: self.escape_lower - 10.0 * pad,
            escape_upper: self.escape_upper + 10.0 * pad,
            ..self.clone()
        }
    }

    /// `(t, x) -> f(t, x - Gamma(t))`; knots are the union of both knot sets.
    pub fn translate_by_transition(&self, gamma: &Transition) -> Self {
        if gamma.is_identically_zero() {
            return self.clone();
        }
        let (f, fx) = (self.rhs.clone(), self.rhs_dx.clone());
        let (g1, g2) = (gamma.clone(), gamma.clone());
        let pad = gamma.sup_abs();
        ScalarField {
            name: format!("{}[x-{}]", self.name, gamma.name()),
            rhs: Arc::new(move |t, x| f(t, x - g1.eval(t))),
            rhs_dx: Arc::new(move |t, x| fx(t, x - g2.eval(t))),
            knots: self.knots.union(gamma.knots()),
            coercivity_radius: self.coercivity_radius + pad,
            lower_seed: self.lower_seed - pad,
            upper_seed: self.upper_seed + pad,
            escape_lower: self.escape_lower - pad,
            escape_upper: self.escape_upper + pad,
            ..self.clone()
        }
    }

    /// Sampled bounds used to bracket the critical parameter:
    /// `(sup_t sup_{x in seeds} f, sup_t |f(t, 0)|)` over `[a, b]`.
    pub fn sampled_bounds(&self, a: f64, b: f64, dt: f64) -> (f64, f64) {
        let n = ((b - a) / dt).ceil().max(1.0) as usize;
        let (lo, hi) = (self.lower_seed, self.upper_seed);
        let nx = 200;
        let mut msup = f64::NEG_INFINITY;
        let mut f0 = 0f64;
        for i in 0..=n {
            let t = a + (b - a) * i as f64 / n as f64;
            for k in 0..=nx {
                let x = lo + (hi - lo) * k as f64 / nx as f64;
                msup = msup.max(self.eval(t, x));
            }
            f0 = f0.max(self.eval(t, 0.0).abs());
        }
        (msup, f0)
    }

    /// Largest value of `f(t, +-(rho + 1))` on a sample grid; negative for a
    /// coercive field.
    pub fn coercivity_defect(&self, a: f64, b: f64, n: usize) -> f64 {
        let r = self.coercivity_radius + 1.0;
        let mut worst = f64::NEG_INFINITY;
        for i in 0..=n {
            let t = a + (b - a) * i as f64 / n as f64;
            worst = worst.max(self.eval(t, r)).max(self.eval(t, -r));
        }
        worst
    }
}

/// Quadratic field `x' = -x^2 + p(t)`.
pub fn make_quadratic(p: &ForcingProfile) -> ScalarField {
    let bound = p.bound();
    let rho = bound.sqrt() + 1.0;
    let q = p.clone();
    ScalarField::new(format!("-x^2 + {}", p.description()), rho, move |t, x| -x * x + q.eval(t), |_, x| -2.0 * x)
        .with_m_bound(rho * rho + bound)
}

/// Free-function form of [`ScalarField::translate_by_transition`].
pub fn translate_by_transition(f: &ScalarField, gamma: &Transition) -> ScalarField {
    f.translate_by_transition(gamma)
}

/// Free-function form of [`ScalarField::shift_parameter`].
pub fn shift_parameter(f: &ScalarField, lambda: f64) -> ScalarField {
    f.shift_parameter(lambda)
}

/// `p_s(t) = p(s + t)`.
pub fn time_shift_forcing(p: &ForcingProfile, s: f64) -> ForcingProfile {
    p.time_shift(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn quadratic_bench_value() {
        let f = make_quadratic(&ForcingProfile::bench());
        assert_eq!(f.eval(0.0, 0.0), 0.962);
        assert_eq!(f.eval_dx(1.0, 3.0), -6.0);
        assert!((f.coercivity_radius() - (2.962f64.sqrt() + 1.0)).abs() < 1e-15);
    }

    #[test]
    fn quadratic_is_coercive() {
        let f = make_quadratic(&ForcingProfile::bench());
        assert!(f.coercivity_defect(-200.0, 200.0, 40000) < 0.0);
    }

    #[test]
    fn translation_and_shift() {
        let p = ForcingProfile::constant(1.0);
        let g = Transition::polygonal(1.0, 0.5).unwrap();
        let f = make_quadratic(&p).translate_by_transition(&g).shift_parameter(0.25);
        let x: f64 = 0.3;
        assert!((f.eval(-5.0, x) - (-(x + 0.5).powi(2) + 1.25)).abs() < 1e-15);
        assert!(f.knots().contains(1.0));
    }

    proptest! {
        #[test]
        fn translate_identity(t in -50.0..50.0f64, x in -5.0..5.0f64, c in 0.1..5.0f64, d in 0.0..3.0f64) {
            let f = make_quadratic(&ForcingProfile::bench());
            let g = Transition::polygonal(c, d).unwrap();
            let ft = f.translate_by_transition(&g);
            prop_assert_eq!(ft.eval(t, x), f.eval(t, x - g.eval(t)));
        }

        #[test]
        fn shift_identity(t in -50.0..50.0f64, x in -5.0..5.0f64, l in -3.0..3.0f64) {
            let f = make_quadratic(&ForcingProfile::bench());
            prop_assert!((f.shift_parameter(l).eval(t, x) - f.eval(t, x) - l).abs() < 1e-12);
        }
    }
}
