//! Time-dependent forcing terms `p(t)` for quadratic fields.

use std::fmt;
use std::sync::Arc;

pub type TimeFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

#[derive(Clone)]
pub struct ForcingProfile {
    description: String,
    value: TimeFn,
    /// Upper bound for `sup |p|`.
    bound: f64,
}

impl fmt::Debug for ForcingProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ForcingProfile")
            .field("description", &self.description)
            .field("bound", &self.bound)
            .finish()
    }
}

impl ForcingProfile {
    pub fn new(description: impl Into<String>, bound: f64, value: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        ForcingProfile { description: description.into(), value: Arc::new(value), bound }
    }

    pub fn constant(v: f64) -> Self {
        Self::new(format!("{v}"), v.abs(), move |_| v)
    }

    /// `p0 - sin(t/2) - sin(sqrt(5) t)`.
    pub fn quasi_periodic(p0: f64) -> Self {
        let s5 = 5f64.sqrt();
        Self::new(format!("{p0} - sin(t/2) - sin(sqrt5 t)"), p0.abs() + 2.0, move |t| {
            p0 - (0.5 * t).sin() - (s5 * t).sin()
        })
    }

    /// Benchmark forcing with mean 0.962.
    pub fn bench() -> Self {
        Self::quasi_periodic(0.962)
    }

    /// Forcing with mean 0.83, used in the phase experiments.
    pub fn phase_bench() -> Self {
        Self::quasi_periodic(0.83)
    }

    #[inline]
    pub fn eval(&self, t: f64) -> f64 {
        (self.value)(t)
    }

    pub fn bound(&self) -> f64 {
        self.bound
    }

    pub fn description(&self) -> &str {
        &self.description
    }

    /// `t -> p(s + t)`.
    pub fn time_shift(&self, s: f64) -> Self {
        let v = self.value.clone();
        ForcingProfile {
            description: format!("({})(t + {s})", self.description),
            value: Arc::new(move |t| v(s + t)),
            bound: self.bound,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bench_value_at_zero() {
        assert_eq!(ForcingProfile::bench().eval(0.0), 0.962);
    }

    #[test]
    fn time_shift_composes() {
        let p = ForcingProfile::bench();
        let q = p.time_shift(1.5).time_shift(-0.5);
        for t in [-3.0, 0.0, 2.7] {
            assert!((q.eval(t) - p.eval(t + 1.0)).abs() < 1e-14);
        }
    }

    #[test]
    fn bound_dominates_samples() {
        let p = ForcingProfile::bench();
        for i in 0..10000 {
            let t = -500.0 + 0.1 * i as f64;
            assert!(p.eval(t).abs() <= p.bound());
        }
    }
}
