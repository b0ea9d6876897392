//! Tracking/tipping classification, the critical parameter `lambda*` and
//! parameter scans.

mod scan;

pub use scan::{
    flip_bracket, format_number, scan_family, scan_phase, scan_rate_step, scan_size, to_csv, FlipBracket, PhaseScan,
    ScanRow,
};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fields::{ScalarField, Transition};
use crate::integrate::{BlowUp, FlowResult, IntegratorConfig};
use crate::pullback::{pullback_values, HyperbolicPair, Seeding};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Case {
    #[serde(rename = "A_tracking")]
    Tracking,
    #[serde(rename = "C_tipping")]
    Tipping,
    #[serde(rename = "indeterminate_B_band")]
    BoundaryBand,
}

impl Case {
    pub fn label(self) -> &'static str {
        match self {
            Case::Tracking => "A_tracking",
            Case::Tipping => "C_tipping",
            Case::BoundaryBand => "indeterminate_B_band",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub case: Case,
    /// `a(t0) - r(t0)`; `-inf` (serialized as null) when a run escaped.
    pub gap: f64,
    /// `|gap|` minus the error budget.
    pub margin: f64,
    pub error_budget: f64,
    pub t0: f64,
    pub a_escape: Option<BlowUp>,
    pub r_escape: Option<BlowUp>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ClassifyConfig {
    /// Time span on which the special solutions are compared; derived from
    /// the field and transition when absent.
    pub span: Option<(f64, f64)>,
    /// Half-width of the default span for transitions centred at zero.
    pub half_span: f64,
    /// Lead time of the seeds before the span.
    pub burn_in: f64,
    /// Comparison time; defaults to the saturation time clipped to the span.
    pub t0: Option<f64>,
    pub tail_tol: f64,
    pub integrator: IntegratorConfig,
}

impl Default for ClassifyConfig {
    fn default() -> Self {
        ClassifyConfig {
            span: None,
            half_span: 40.0,
            burn_in: 60.0,
            t0: None,
            tail_tol: 1e-8,
            integrator: IntegratorConfig::default(),
        }
    }
}

impl ClassifyConfig {
    pub fn resolve_span(&self, f: &ScalarField) -> (f64, f64) {
        if let Some(s) = self.span {
            return s;
        }
        match f.active_window() {
            Some(w) => w,
            None => (-self.half_span, self.half_span),
        }
    }

    pub fn resolve_t0(&self, f: &ScalarField, gamma: &Transition, span: (f64, f64)) -> f64 {
        if let Some(t) = self.t0 {
            return t;
        }
        if gamma.is_identically_zero() {
            return if f.active_window().is_some() { span.1 } else { 0.5 * (span.0 + span.1) };
        }
        gamma.saturation_time().clamp(span.0, span.1)
    }

    pub fn error_budget(&self, scale: f64) -> f64 {
        self.integrator.error_scale(scale) + self.tail_tol
    }
}

/// Compares the special solutions of `x' = f(t, x - Gamma(t))` at `t0`.
///
/// With a pair the runs start from `ã + Gamma`, `r̃ + Gamma` at the ends of
/// the pair window; otherwise from the field's seeds `burn_in` before and
/// after the span.
pub fn classify(f: &ScalarField, gamma: &Transition, pair: Option<&HyperbolicPair>, cfg: &ClassifyConfig) -> Result<Verdict> {
    let span = cfg.resolve_span(f);
    let t0 = cfg.resolve_t0(f, gamma, span);
    if !(span.0 <= t0 && t0 <= span.1) {
        return Err(Error::InvalidParameter(format!("comparison time {t0} outside span {span:?}")));
    }
    let seeding = match pair {
        Some(p) => Seeding::Pair(p),
        None => Seeding::Coercive { burn_in: cfg.burn_in },
    };
    let g = f.translate_by_transition(gamma);
    let v = pullback_values(&g, gamma, seeding, span, t0, &cfg.integrator)?;
    let escape = |r: &FlowResult| match r {
        FlowResult::Escaped(b) => Some(*b),
        FlowResult::Reached(_) => None,
    };
    let scale = g.coercivity_radius().max(v.a.state().unwrap_or(1.0).abs());
    let budget = cfg.error_budget(scale);
    let case = if v.gap > budget {
        Case::Tracking
    } else if v.gap < -budget {
        Case::Tipping
    } else {
        Case::BoundaryBand
    };
    Ok(Verdict {
        case,
        gap: v.gap,
        margin: v.gap.abs() - budget,
        error_budget: budget,
        t0,
        a_escape: escape(&v.a),
        r_escape: v.r.as_ref().and_then(escape),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LambdaStar {
    pub value: f64,
    pub bracket: (f64, f64),
    pub tol: f64,
    pub iterations: usize,
}

impl LambdaStar {
    /// Verdict for the unshifted equation read from the bracket.
    pub fn sign_label(&self) -> &'static str {
        if self.bracket.1 < 0.0 {
            "tracking"
        } else if self.bracket.0 > 0.0 {
            "tipping"
        } else {
            "indeterminate"
        }
    }
}

/// Initial bracket `[-sup f - 1, sup |f(., 0)| + 1]` sampled on the span.
pub fn lambda_bracket(g: &ScalarField, span: (f64, f64), burn_in: f64) -> (f64, f64) {
    let (msup, f0) = g.sampled_bounds(span.0 - burn_in, span.1 + burn_in, 0.05);
    (-msup.abs() - 1.0, f0 + 1.0)
}

/// Bisection for `lambda*` of `x' = f(t, x - Gamma(t)) + lambda`.
pub fn lambda_star(f: &ScalarField, gamma: &Transition, tol: f64, cfg: &ClassifyConfig) -> Result<LambdaStar> {
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter(format!("tolerance must be positive, got {tol}")));
    }
    let g = f.translate_by_transition(gamma);
    let span = cfg.resolve_span(f);
    let (mut lo, mut hi) = lambda_bracket(&g, span, cfg.burn_in);
    let at = |l: f64| classify(&f.shift_parameter(l), gamma, None, cfg);
    let vlo = at(lo)?;
    if vlo.case != Case::Tipping {
        return Err(Error::Bracket(format!("lower end {lo} gives {}", vlo.case.label())));
    }
    let vhi = at(hi)?;
    if vhi.case != Case::Tracking {
        return Err(Error::Bracket(format!("upper end {hi} gives {}", vhi.case.label())));
    }
    let mut iterations = 0;
    while hi - lo > 2.0 * tol {
        let mid = 0.5 * (lo + hi);
        let v = at(mid)?;
        let up = match v.case {
            Case::Tracking => true,
            Case::Tipping => false,
            Case::BoundaryBand => v.gap >= 0.0,
        };
        if up {
            hi = mid;
        } else {
            lo = mid;
        }
        iterations += 1;
    }
    Ok(LambdaStar { value: 0.5 * (lo + hi), bracket: (lo, hi), tol, iterations })
}

#[cfg(test)]
mod tests;
