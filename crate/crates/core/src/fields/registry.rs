//! String-addressable model library.

use serde::{Deserialize, Serialize};

use super::{
    climate_field, hopfield_field, make_quadratic, ClimateMode, ClimateParams, ForcingProfile, ScalarField,
    Transition,
};
use crate::error::{Error, Result};

/// Registered model identifiers with a one-line description each.
pub fn model_ids() -> Vec<(&'static str, &'static str)> {
    vec![
        ("quadratic:bench53", "x' = -(x - Gamma^h(c t))^2 + 0.962 - sin(t/2) - sin(sqrt5 t), Gamma = (2/pi) arctan"),
        ("quadratic:phase", "x' = -(x - d Gamma(c t))^2 + p(t + s), p = 0.83 - sin(t/2) - sin(sqrt5 t)"),
        ("polygonal", "x' = -(x - Gamma_{c,d}(t))^2 + p0, polygonal transition"),
        ("climate", "energy balance model with logistic albedo transition (c, d, l)"),
        ("hopfield", "single neuron with decay rate a_0(t) + alpha / (1 + e^{-t/5})"),
    ]
}

/// Parameters selecting a model and its transition.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSpec {
    pub id: String,
    #[serde(default)]
    pub c: Option<f64>,
    #[serde(default)]
    pub d: Option<f64>,
    #[serde(default)]
    pub h: Option<f64>,
    #[serde(default)]
    pub s: Option<f64>,
    #[serde(default)]
    pub l: Option<f64>,
    #[serde(default)]
    pub alpha: Option<f64>,
    #[serde(default)]
    pub p0: Option<f64>,
    /// `arctan`, `neg-arctan`, `polygonal`, `step` or `zero`.
    #[serde(default)]
    pub transition: Option<String>,
    /// Frozen albedo argument for the climate model.
    #[serde(default)]
    pub frozen_s: Option<f64>,
}

impl ModelSpec {
    pub fn new(id: &str) -> Self {
        ModelSpec { id: id.to_string(), ..Default::default() }
    }
}

/// An unperturbed field together with the transition it is translated by.
#[derive(Clone, Debug)]
pub struct Problem {
    pub field: ScalarField,
    pub transition: Transition,
}

impl Problem {
    pub fn perturbed(&self) -> ScalarField {
        self.field.translate_by_transition(&self.transition)
    }
}

fn base_transition(name: &str, c: f64, d: f64) -> Result<Transition> {
    Ok(match name {
        "arctan" => Transition::arctan().rescale_time(c)?.scale(d),
        "neg-arctan" => Transition::arctan().rescale_time(c)?.scale(-d),
        "polygonal" => Transition::polygonal(c, d)?,
        "step" => Transition::step(d),
        "zero" => Transition::zero(),
        other => return Err(Error::Config(format!("unknown transition '{other}'"))),
    })
}

fn discretized(g: Transition, h: Option<f64>) -> Result<Transition> {
    match h {
        Some(h) if h > 0.0 => g.discretize(h),
        Some(h) if h < 0.0 => Err(Error::InvalidParameter(format!("step size must be nonnegative, got {h}"))),
        _ => Ok(g),
    }
}

pub fn build_model(spec: &ModelSpec) -> Result<Problem> {
    let c = spec.c.unwrap_or(1.0);
    let d = spec.d.unwrap_or(1.0);
    match spec.id.as_str() {
        "quadratic:bench53" => {
            let p = ForcingProfile::quasi_periodic(spec.p0.unwrap_or(0.962)).time_shift(spec.s.unwrap_or(0.0));
            let g = base_transition(spec.transition.as_deref().unwrap_or("arctan"), c, d)?;
            Ok(Problem { field: make_quadratic(&p), transition: discretized(g, spec.h)? })
        }
        "quadratic:phase" => {
            let p = ForcingProfile::quasi_periodic(spec.p0.unwrap_or(0.83)).time_shift(spec.s.unwrap_or(0.0));
            let g = base_transition(spec.transition.as_deref().unwrap_or("arctan"), c, d)?;
            Ok(Problem { field: make_quadratic(&p), transition: discretized(g, spec.h)? })
        }
        "polygonal" => {
            let p = ForcingProfile::constant(spec.p0.unwrap_or(1.0));
            let g = base_transition(spec.transition.as_deref().unwrap_or("polygonal"), c, d)?;
            Ok(Problem { field: make_quadratic(&p), transition: discretized(g, spec.h)? })
        }
        "climate" => {
            let mode = match spec.frozen_s {
                Some(s) => ClimateMode::Frozen { s },
                None => ClimateMode::Coupled,
            };
            let params = ClimateParams { mode, c: spec.c.unwrap_or(0.05), d: spec.d.unwrap_or(0.999), l: spec.l.unwrap_or(0.0) };
            Ok(Problem { field: climate_field(params)?, transition: Transition::zero() })
        }
        "hopfield" => Ok(Problem { field: hopfield_field(spec.alpha.unwrap_or(0.0))?, transition: Transition::zero() }),
        other => Err(Error::Config(format!("unknown model id '{other}'"))),
    }
}
