//! Zero-dimensional energy balance model with ice-albedo feedback.
//!
//! Temperature in Kelvin, time in years. The albedo coefficients move along
//! a logistic transition in `b`, with `a = 1 + d m`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::ScalarField;
use crate::error::{Error, Result};

pub const TAU: f64 = 1e8;
pub const EPS_SA: f64 = 0.62;
pub const SIGMA: f64 = 5.6704e-8;
pub const I0: f64 = 1366.0;
/// Seconds per year.
pub const KAPPA: f64 = 60.0 * 60.0 * 24.0 * 365.25;
pub const B_MINUS: f64 = 1.690e-5;
pub const B_PLUS: f64 = 1.835e-5;
/// Bounds of the irradiance factor `mu(t)`.
pub const MU_MINUS: f64 = 0.9993;
pub const MU_PLUS: f64 = 1.0007;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClimateThresholds {
    pub t1: f64,
    pub t2: f64,
    pub d1: f64,
    pub d2: f64,
}

/// Temperatures `T1 > T2` and the size thresholds `d2 <= d1`.
pub fn climate_constants(mu_minus: f64, mu_plus: f64, b_minus: f64, b_plus: f64) -> Result<ClimateThresholds> {
    if !(mu_minus > 0.0 && mu_minus <= mu_plus && b_minus > 0.0 && b_minus <= b_plus) {
        return Err(Error::InvalidParameter(format!(
            "need 0 < mu- <= mu+ and 0 < b- <= b+, got ({mu_minus}, {mu_plus}, {b_minus}, {b_plus})"
        )));
    }
    let (im, ip) = (mu_minus * I0, mu_plus * I0);
    let es = EPS_SA * SIGMA;
    let t1 = (b_plus * ip / (8.0 * es)).sqrt();
    let t2 = (b_plus * ip / (24.0 * es)).sqrt();
    let d1 = 1.0 - ((ip / im).sqrt() - 1.0).powi(2);
    let d2 = 1.0 - (b_plus * ip / (b_minus * im) - 1.0).powi(2) * (b_plus * ip.sqrt() / (b_minus * im.sqrt()) + 1.0).powi(-2);
    Ok(ClimateThresholds { t1, t2, d1, d2 })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum ClimateMode {
    /// Albedo coefficients frozen at the transition argument `s`.
    Frozen { s: f64 },
    /// Albedo coefficients follow `b(c (u + l))`.
    Coupled,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClimateParams {
    pub mode: ClimateMode,
    pub c: f64,
    pub d: f64,
    pub l: f64,
}

impl Default for ClimateParams {
    fn default() -> Self {
        ClimateParams { mode: ClimateMode::Coupled, c: 0.05, d: 0.999, l: 0.0 }
    }
}

/// Irradiance factor with the 11-year and annual cycles; `u` in years.
pub fn irradiance_factor(u: f64) -> f64 {
    1.0 + 0.0005 * (2.0 * PI * u / 11.0).sin() + 0.0002 * (2.0 * PI * u).sin()
}

fn logistic_k() -> f64 {
    1e-6 / (1.0 - 1e-6)
}

/// Logistic weight with value `1e-6` at zero.
pub fn transition_weight(v: f64) -> f64 {
    let z = v + logistic_k().ln();
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// Albedo slope `b` as a function of the transition argument in years.
pub fn albedo_slope(v: f64) -> f64 {
    let w = transition_weight(v);
    B_MINUS * (1.0 - w) + B_PLUS * w
}

pub fn climate_field(p: ClimateParams) -> Result<ScalarField> {
    if !(p.d > 0.0) {
        return Err(Error::InvalidParameter(format!("climate size d must be positive, got {}", p.d)));
    }
    if matches!(p.mode, ClimateMode::Coupled) && !(p.c > 0.0) {
        return Err(Error::InvalidParameter(format!("climate rate c must be positive, got {}", p.c)));
    }
    let th = climate_constants(MU_MINUS, MU_PLUS, B_MINUS, B_PLUS)?;
    let es = EPS_SA * SIGMA;
    let im = MU_MINUS * I0;
    let scale = KAPPA / TAU;
    let ClimateParams { mode, c, d, l } = p;
    let arg = move |u: f64| match mode {
        ClimateMode::Frozen { s } => s,
        ClimateMode::Coupled => c * (u + l),
    };
    let rhs = move |u: f64, temp: f64| {
        if !(temp > 0.0) {
            return f64::NAN;
        }
        let i = irradiance_factor(u) * I0;
        let b = albedo_slope(arg(u));
        let m = im * b * b / (16.0 * es);
        let t2 = temp * temp;
        scale * (-es * t2 * t2 + 0.25 * i * b * t2 - 0.25 * i * d * m)
    };
    let rhs_dx = move |u: f64, temp: f64| {
        if !(temp > 0.0) {
            return f64::NAN;
        }
        let i = irradiance_factor(u) * I0;
        let b = albedo_slope(arg(u));
        scale * (-4.0 * es * temp.powi(3) + 0.5 * i * b * temp)
    };
    let name = match mode {
        ClimateMode::Frozen { s } => format!("climate(frozen s={s}, d={d})"),
        ClimateMode::Coupled => format!("climate(c={c}, d={d}, l={l})"),
    };
    let mut f = ScalarField::new(name, th.t1, rhs, rhs_dx)
        .with_coercive(false)
        .with_seeds(0.5 * (th.t2 + 250.0), 350.0)
        .with_escape(th.t2, 2000.0);
    if matches!(mode, ClimateMode::Coupled) {
        let centre = -logistic_k().ln();
        f = f.with_active_window(((centre - 20.0) / c - l, (centre + 20.0) / c - l));
    }
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn temperature_ratio_is_sqrt3() {
        let th = climate_constants(MU_MINUS, MU_PLUS, B_MINUS, B_PLUS).unwrap();
        assert!((th.t1 / th.t2 - 3f64.sqrt()).abs() < 1e-12);
        assert!(th.d2 <= th.d1);
    }

    #[test]
    fn weight_at_zero() {
        assert!((transition_weight(0.0) - 1e-6).abs() < 1e-18);
        assert!((albedo_slope(200.0) - B_PLUS).abs() < 1e-18);
        assert!((albedo_slope(-200.0) - B_MINUS).abs() < 1e-18);
    }

    #[test]
    fn rejects_nonpositive_temperature() {
        let f = climate_field(ClimateParams::default()).unwrap();
        assert!(f.eval(0.0, 0.0).is_nan());
        assert!(f.eval(0.0, -3.0).is_nan());
    }

    #[test]
    fn cold_constant_is_upper_solution() {
        let f = climate_field(ClimateParams::default()).unwrap();
        for i in 0..2000 {
            let u = -100.0 + 0.5 * i as f64;
            assert!(f.eval(u, 200.0) < 0.0);
            assert!(f.eval(u, 350.0) < 0.0);
        }
    }

    #[test]
    fn concave_above_t2() {
        let th = climate_constants(MU_MINUS, MU_PLUS, B_MINUS, B_PLUS).unwrap();
        let f = climate_field(ClimateParams::default()).unwrap();
        for i in 0..500 {
            let u = -50.0 + 1.37 * i as f64;
            for k in 0..50 {
                let t = th.t2 + 1.0 + 4.0 * k as f64;
                let h = 1e-2;
                let d2 = f.eval_dx(u, t + h) - f.eval_dx(u, t - h);
                assert!(d2 < 0.0);
            }
        }
    }
}
