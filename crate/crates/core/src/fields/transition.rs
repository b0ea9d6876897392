//! Transition functions `Gamma(t)` with finite limits at both ends.

use std::f64::consts::{FRAC_2_PI, PI};
use std::fmt;
use std::sync::Arc;

use super::forcing::TimeFn;
use super::knots::{lattice_index, Knots};
use crate::error::{Error, Result};

/// Default tolerance used to define the saturation time.
pub const DEFAULT_TAIL_TOL: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Monotonicity {
    Nondecreasing,
    Nonincreasing,
    Constant,
    Unknown,
}

impl Monotonicity {
    fn flip(self) -> Self {
        match self {
            Monotonicity::Nondecreasing => Monotonicity::Nonincreasing,
            Monotonicity::Nonincreasing => Monotonicity::Nondecreasing,
            m => m,
        }
    }

    pub fn is_nondecreasing(self) -> bool {
        matches!(self, Monotonicity::Nondecreasing | Monotonicity::Constant)
    }

    pub fn is_nonincreasing(self) -> bool {
        matches!(self, Monotonicity::Nonincreasing | Monotonicity::Constant)
    }
}

type SatFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

#[derive(Clone)]
pub struct Transition {
    name: String,
    value: TimeFn,
    derivative: Option<TimeFn>,
    gamma_minus: f64,
    gamma_plus: f64,
    sup_abs: f64,
    monotone: Monotonicity,
    knots: Knots,
    /// Maps a tail tolerance to a time beyond which `|Gamma(+-t) - gamma_+-| < tol`.
    saturation: SatFn,
    /// Spacing of the piecewise-constant approximation, if any.
    step: Option<f64>,
}

impl fmt::Debug for Transition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Transition")
            .field("name", &self.name)
            .field("gamma_minus", &self.gamma_minus)
            .field("gamma_plus", &self.gamma_plus)
            .field("monotone", &self.monotone)
            .field("step", &self.step)
            .finish()
    }
}

impl Transition {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        name: impl Into<String>,
        value: impl Fn(f64) -> f64 + Send + Sync + 'static,
        derivative: Option<TimeFn>,
        gamma_minus: f64,
        gamma_plus: f64,
        monotone: Monotonicity,
        knots: Knots,
        saturation: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Transition {
            name: name.into(),
            value: Arc::new(value),
            derivative,
            gamma_minus,
            gamma_plus,
            sup_abs: gamma_minus.abs().max(gamma_plus.abs()),
            monotone,
            knots,
            saturation: Arc::new(saturation),
            step: None,
        }
    }

    pub fn zero() -> Self {
        Self::constant(0.0)
    }

    pub fn constant(v: f64) -> Self {
        Self::new(
            format!("const({v})"),
            move |_| v,
            Some(Arc::new(|_| 0.0)),
            v,
            v,
            Monotonicity::Constant,
            Knots::none(),
            |_| 0.0,
        )
    }

    /// `(2/pi) arctan(t)`, from -1 to 1.
    pub fn arctan() -> Self {
        Self::new(
            "arctan",
            |t: f64| FRAC_2_PI * t.atan(),
            Some(Arc::new(|t: f64| FRAC_2_PI / (1.0 + t * t))),
            -1.0,
            1.0,
            Monotonicity::Nondecreasing,
            Knots::none(),
            |tol: f64| 1.0 / (0.5 * PI * tol.min(1.0)).tan(),
        )
    }

    /// Polygonal transition: `-d` up to `-1/c`, linear with slope `c d`, `d` from `1/c`.
    pub fn polygonal(c: f64, d: f64) -> Result<Self> {
        if !(c > 0.0) || !c.is_finite() {
            return Err(Error::InvalidParameter(format!("polygonal rate must be positive, got {c}")));
        }
        if !(d >= 0.0) {
            return Err(Error::InvalidParameter(format!("polygonal size must be nonnegative, got {d}")));
        }
        let tc = 1.0 / c;
        Ok(Self::new(
            format!("polygonal(c={c}, d={d})"),
            move |t: f64| (c * d * t).clamp(-d, d),
            Some(Arc::new(move |t: f64| if t.abs() < tc { c * d } else { 0.0 })),
            -d,
            d,
            Monotonicity::Nondecreasing,
            Knots::points(vec![-tc, tc]),
            move |_| tc,
        ))
    }

    /// Jump from `-d` to `d` at `t = 0`.
    pub fn step(d: f64) -> Self {
        let mono = if d >= 0.0 { Monotonicity::Nondecreasing } else { Monotonicity::Nonincreasing };
        Self::new(
            format!("step(d={d})"),
            move |t: f64| {
                if t < 0.0 {
                    -d
                } else if t > 0.0 {
                    d
                } else {
                    0.0
                }
            },
            None,
            -d,
            d,
            mono,
            Knots::points(vec![0.0]),
            |_| 0.0,
        )
    }

    #[inline]
    pub fn eval(&self, t: f64) -> f64 {
        (self.value)(t)
    }

    pub fn derivative(&self, t: f64) -> Option<f64> {
        self.derivative.as_ref().map(|d| d(t))
    }

    pub fn has_derivative(&self) -> bool {
        self.derivative.is_some()
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn gamma_minus(&self) -> f64 {
        self.gamma_minus
    }

    pub fn gamma_plus(&self) -> f64 {
        self.gamma_plus
    }

    pub fn sup_abs(&self) -> f64 {
        self.sup_abs
    }

    pub fn monotone(&self) -> Monotonicity {
        self.monotone
    }

    pub fn knots(&self) -> &Knots {
        &self.knots
    }

    pub fn step_size(&self) -> Option<f64> {
        self.step
    }

    pub fn is_identically_zero(&self) -> bool {
        self.monotone == Monotonicity::Constant && self.gamma_minus == 0.0 && self.gamma_plus == 0.0
    }

    pub fn saturation_time(&self) -> f64 {
        self.saturation_time_for(DEFAULT_TAIL_TOL)
    }

    pub fn saturation_time_for(&self, tol: f64) -> f64 {
        (self.saturation)(tol)
    }

    /// `t -> Gamma(c t)`.
    pub fn rescale_time(&self, c: f64) -> Result<Self> {
        if !(c > 0.0) || !c.is_finite() {
            return Err(Error::InvalidParameter(format!("rate must be positive, got {c}")));
        }
        let v = self.value.clone();
        let dv = self.derivative.clone();
        let sat = self.saturation.clone();
        Ok(Transition {
            name: format!("{}(c={c})", self.name),
            value: Arc::new(move |t| v(c * t)),
            derivative: dv.map(|d| Arc::new(move |t: f64| c * d(c * t)) as TimeFn),
            gamma_minus: self.gamma_minus,
            gamma_plus: self.gamma_plus,
            sup_abs: self.sup_abs,
            monotone: self.monotone,
            knots: self.knots.rescale(c),
            saturation: Arc::new(move |tol| sat(tol) / c),
            step: self.step.map(|h| h / c),
        })
    }

    /// `t -> d Gamma(t)`.
    pub fn scale(&self, d: f64) -> Self {
        let v = self.value.clone();
        let dv = self.derivative.clone();
        let sat = self.saturation.clone();
        let (gm, gp) = (d * self.gamma_minus, d * self.gamma_plus);
        let monotone = if d == 0.0 {
            Monotonicity::Constant
        } else if d < 0.0 {
            self.monotone.flip()
        } else {
            self.monotone
        };
        Transition {
            name: format!("{}*{d}", self.name),
            value: Arc::new(move |t| d * v(t)),
            derivative: dv.map(|g| Arc::new(move |t: f64| d * g(t)) as TimeFn),
            gamma_minus: gm,
            gamma_plus: gp,
            sup_abs: self.sup_abs * d.abs(),
            monotone,
            knots: self.knots.clone(),
            saturation: Arc::new(move |tol| if d == 0.0 { 0.0 } else { sat(tol / d.abs()) }),
            step: self.step,
        }
    }

    pub fn negate(&self) -> Self {
        self.scale(-1.0)
    }

    /// `t -> Gamma(t + s)`.
    pub fn time_shift(&self, s: f64) -> Self {
        let v = self.value.clone();
        let dv = self.derivative.clone();
        let sat = self.saturation.clone();
        Transition {
            name: format!("{}(t+{s})", self.name),
            value: Arc::new(move |t| v(t + s)),
            derivative: dv.map(|g| Arc::new(move |t: f64| g(t + s)) as TimeFn),
            saturation: Arc::new(move |tol| sat(tol) + s.abs()),
            knots: self.knots.shift(s),
            ..self.clone()
        }
    }

    /// Piecewise-constant approximation `Gamma(j h)` on `[j h, (j + 1) h)`.
    pub fn discretize(&self, h: f64) -> Result<Self> {
        if !(h > 0.0) || !h.is_finite() {
            return Err(Error::InvalidParameter(format!("step size must be positive, got {h}")));
        }
        let v = self.value.clone();
        let sat = self.saturation.clone();
        Ok(Transition {
            name: format!("{}[h={h}]", self.name),
            value: Arc::new(move |t| v(lattice_index(t, h) * h)),
            derivative: None,
            gamma_minus: self.gamma_minus,
            gamma_plus: self.gamma_plus,
            sup_abs: self.sup_abs,
            monotone: self.monotone,
            knots: Knots::lattice(h),
            saturation: Arc::new(move |tol| sat(tol) + h),
            step: Some(h),
        })
    }

    /// Largest violation of the declared monotonicity on a sample grid.
    pub fn monotonicity_defect(&self, a: f64, b: f64, n: usize) -> f64 {
        let mut worst = 0f64;
        let mut prev = self.eval(a);
        for i in 1..=n {
            let t = a + (b - a) * i as f64 / n as f64;
            let g = self.eval(t);
            let inc = g - prev;
            let bad = match self.monotone {
                Monotonicity::Nondecreasing => (-inc).max(0.0),
                Monotonicity::Nonincreasing => inc.max(0.0),
                Monotonicity::Constant => inc.abs(),
                Monotonicity::Unknown => 0.0,
            };
            worst = worst.max(bad);
            prev = g;
        }
        worst
    }
}

/// Free-function form of [`Transition::discretize`].
pub fn discretize_transition(gamma: &Transition, h: f64) -> Result<Transition> {
    gamma.discretize(h)
}

/// Free-function form of [`Transition::polygonal`].
pub fn polygonal_transition(c: f64, d: f64) -> Result<Transition> {
    Transition::polygonal(c, d)
}

/// Free-function form of [`Transition::step`].
pub fn step_transition(d: f64) -> Transition {
    Transition::step(d)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arctan_discretized_unit_step() {
        let g = Transition::arctan().discretize(1.0).unwrap();
        assert_eq!(g.eval(0.5), 0.0);
        assert!((g.eval(1.0) - 0.5).abs() < 1e-15);
        assert!((g.eval(1.999) - 0.5).abs() < 1e-15);
        assert!((g.eval(-0.5) + 0.5).abs() < 1e-15);
    }

    #[test]
    fn discretization_error_bound() {
        let g = Transition::arctan();
        for &h in &[0.1, 0.5, 1.0, 2.0] {
            let gh = g.discretize(h).unwrap();
            let mut worst = 0f64;
            for i in 0..20000 {
                let t = -50.0 + 0.005 * i as f64;
                worst = worst.max((gh.eval(t) - g.eval(t)).abs());
            }
            assert!(worst <= FRAC_2_PI * h + 1e-12, "h = {h}: {worst}");
        }
    }

    #[test]
    fn polygonal_values() {
        let g = Transition::polygonal(2.0, 3.0).unwrap();
        assert_eq!(g.eval(0.25), 1.5);
        assert_eq!(g.eval(-10.0), -3.0);
        assert_eq!(g.eval(0.5), 3.0);
        assert_eq!(g.derivative(0.0), Some(6.0));
        assert!(Transition::polygonal(0.0, 1.0).is_err());
        assert!(Transition::polygonal(-1.0, 1.0).is_err());
    }

    #[test]
    fn step_values() {
        let g = Transition::step(2.0);
        assert_eq!(g.eval(-1e-9), -2.0);
        assert_eq!(g.eval(0.0), 0.0);
        assert_eq!(g.eval(3.0), 2.0);
    }

    #[test]
    fn arctan_saturation() {
        let g = Transition::arctan().rescale_time(0.5).unwrap();
        let tol = 1e-4;
        let t = g.saturation_time_for(tol);
        assert!((g.eval(t) - 1.0).abs() <= tol * (1.0 + 1e-9));
        assert!((g.eval(-t) + 1.0).abs() <= tol * (1.0 + 1e-9));
        assert!((g.eval(0.9 * t) - 1.0).abs() > tol);
    }

    #[test]
    fn negated_is_nonincreasing() {
        let g = Transition::arctan().negate();
        assert_eq!(g.monotone(), Monotonicity::Nonincreasing);
        assert_eq!(g.gamma_minus(), 1.0);
        assert!(g.monotonicity_defect(-20.0, 20.0, 2000) == 0.0);
    }

    #[test]
    fn rescaled_lattice_knots() {
        let g = Transition::arctan().rescale_time(2.0).unwrap().discretize(0.5).unwrap();
        assert_eq!(g.knots().next_after(0.1, 1.0), Some(0.5));
        assert_eq!(g.step_size(), Some(0.5));
    }
}
