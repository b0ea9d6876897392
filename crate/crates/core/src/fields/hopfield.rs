//! Single-neuron Hopfield model with a slowly increasing decay rate.

use std::f64::consts::PI;

use super::ScalarField;
use crate::error::{Error, Result};

fn golden() -> f64 {
    0.5 * (1.0 + 5f64.sqrt())
}

/// Sigmoid `(1 - e^{-y}) / (1 + e^{-y})`.
pub fn activation(y: f64) -> f64 {
    (0.5 * y).tanh()
}

/// Decay rate before the transition.
pub fn decay_base(t: f64) -> f64 {
    0.2 * (1.0 + (PI * t).sin() * (golden() * t).sin())
}

/// Logistic profile of the transition in the decay rate.
pub fn hopfield_transition(t: f64) -> f64 {
    1.0 / (1.0 + (-t / 5.0).exp())
}

pub fn decay(alpha: f64, t: f64) -> f64 {
    decay_base(t) + alpha * hopfield_transition(t)
}

pub fn input(t: f64) -> f64 {
    0.2 * ((2.0 * PI * t / 5f64.sqrt()).sin() * (t / 7.0).cos() - 1.5)
}

pub fn gain(t: f64) -> f64 {
    1.0 + 0.75 * (t / 7.0).sin() * (golden() * t).sin()
}

/// `y' = -a_alpha(t) y + z(t) f(y) + I(t)`.
pub fn hopfield_field(alpha: f64) -> Result<ScalarField> {
    if !alpha.is_finite() || alpha < 0.0 {
        return Err(Error::InvalidParameter(format!("alpha must be nonnegative, got {alpha}")));
    }
    let rhs = move |t: f64, y: f64| -decay(alpha, t) * y + gain(t) * activation(y) + input(t);
    let rhs_dx = move |t: f64, y: f64| {
        let s = activation(y);
        -decay(alpha, t) + gain(t) * 0.5 * (1.0 - s * s)
    };
    Ok(ScalarField::new(format!("hopfield(alpha={alpha})"), 6.0, rhs, rhs_dx)
        .with_coercive(false)
        .with_seeds(0.0, 30.0)
        .with_escape(0.0, 60.0)
        .with_active_window((-100.0, 100.0)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coefficient_bounds() {
        for i in 0..200000 {
            let t = -1000.0 + 0.01 * i as f64;
            assert!(input(t) <= -0.1 + 1e-15);
            assert!(gain(t) >= 0.25 - 1e-15);
            let a = decay_base(t);
            assert!((0.0..=0.4).contains(&a));
        }
    }

    #[test]
    fn zero_is_upper_solution() {
        let f = hopfield_field(0.3).unwrap();
        for i in 0..10000 {
            let t = -500.0 + 0.1 * i as f64;
            assert!(f.eval(t, 0.0) < 0.0);
        }
    }

    #[test]
    fn activation_matches_definition() {
        for &y in &[-3.0f64, -0.2, 0.0, 1.0, 4.5] {
            let e = (-y).exp();
            assert!((activation(y) - (1.0 - e) / (1.0 + e)).abs() < 1e-15);
        }
    }
}
