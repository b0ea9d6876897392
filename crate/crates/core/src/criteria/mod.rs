//! Tracking and tipping certificates.
//!
//! Every check evaluates a finite list of inequalities built from the
//! unperturbed pair `(ã, r̃)`, the transition `Gamma` and flows of the
//! unperturbed field. A certificate fires only when its smallest slack
//! exceeds an explicit error budget.

mod continuous;
mod piecewise;
mod polygonal;

pub use continuous::{
    check_continuous_tipping, check_continuous_tracking, check_continuous_tracking_on, check_slope_bound, search_continuous_tipping, slope_sup,
    ContinuousVariant,
};
pub use piecewise::{
    check_piecewise_tipping, check_piecewise_tracking, NuSchedule, Piecewise, TippingStrategy, TrackingStrategy,
};
pub use polygonal::{check_polygonal, polygonal_certificates};

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::bifurcation::LambdaStar;
use crate::error::{Error, Result};
use crate::fields::{ScalarField, Transition};
use crate::integrate::{integrate_span, IntegratorConfig, Trajectory};
use crate::pullback::{attractor_repeller, HyperbolicPair, PairConfig};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CertVerdict {
    Tracking,
    TippingNoPair,
    TippingNoBounded,
    NotApplicable,
}

impl CertVerdict {
    pub fn label(self) -> &'static str {
        match self {
            CertVerdict::Tracking => "tracking",
            CertVerdict::TippingNoPair => "tipping_no_pair",
            CertVerdict::TippingNoBounded => "tipping_no_bounded",
            CertVerdict::NotApplicable => "not_applicable",
        }
    }

    pub fn is_tipping(self) -> bool {
        matches!(self, CertVerdict::TippingNoPair | CertVerdict::TippingNoBounded)
    }
}

/// One evaluated inequality. `slack >= 0` means it holds.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Inequality {
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
}

impl Inequality {
    /// `lhs >= rhs`.
    pub fn geq(lhs: f64, rhs: f64) -> Self {
        Inequality { lhs, rhs, slack: slack(lhs - rhs) }
    }

    /// `lhs <= rhs`.
    pub fn leq(lhs: f64, rhs: f64) -> Self {
        Inequality { lhs, rhs, slack: slack(rhs - lhs) }
    }
}

fn slack(x: f64) -> f64 {
    if x.is_nan() {
        f64::NEG_INFINITY
    } else {
        x
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub criterion: String,
    pub verdict: CertVerdict,
    pub parameters: BTreeMap<String, Value>,
    pub margin: f64,
    pub error_budget: f64,
    pub inequalities: Vec<Inequality>,
    /// Integrations of the transition equation used by the inequalities.
    #[serde(skip)]
    pub transition_solves: usize,
}

impl Certificate {
    pub(crate) fn new(criterion: &str, error_budget: f64) -> Self {
        Certificate {
            criterion: criterion.to_string(),
            verdict: CertVerdict::NotApplicable,
            parameters: BTreeMap::new(),
            margin: f64::NEG_INFINITY,
            error_budget,
            inequalities: Vec::new(),
            transition_solves: 0,
        }
    }

    pub(crate) fn param(mut self, key: &str, v: impl Into<Value>) -> Self {
        self.parameters.insert(key.to_string(), v.into());
        self
    }

    pub(crate) fn set(&mut self, key: &str, v: impl Into<Value>) {
        self.parameters.insert(key.to_string(), v.into());
    }

    /// Sets the margin from the logged inequalities and issues `on_fire`
    /// when it exceeds the budget.
    pub(crate) fn settle(mut self, on_fire: CertVerdict) -> Self {
        self.margin = self.inequalities.iter().map(|q| q.slack).fold(f64::INFINITY, f64::min);
        if self.inequalities.is_empty() {
            self.margin = f64::NEG_INFINITY;
        }
        self.verdict = if self.margin > self.error_budget { on_fire } else { CertVerdict::NotApplicable };
        self
    }

    /// The hypotheses of the criterion fail before any inequality applies.
    pub(crate) fn inapplicable(mut self, reason: &str) -> Self {
        self.set("reason", reason);
        self.verdict = CertVerdict::NotApplicable;
        self.margin = f64::NEG_INFINITY;
        self
    }

    pub fn fired(&self) -> bool {
        self.verdict != CertVerdict::NotApplicable
    }
}

/// Best certificate of a family: the first firing one or, failing that, the
/// one with the largest margin.
pub(crate) fn best_of(mut certs: Vec<Certificate>) -> Option<Certificate> {
    if let Some(i) = certs.iter().position(|c| c.fired()) {
        return Some(certs.swap_remove(i));
    }
    certs.into_iter().reduce(|a, b| if b.margin > a.margin { b } else { a })
}

/// Fails when a bundle holds both a tracking and a tipping verdict.
pub fn check_consistency(certs: &[Certificate]) -> Result<()> {
    let track = certs.iter().find(|c| c.verdict == CertVerdict::Tracking);
    let tip = certs.iter().find(|c| c.verdict.is_tipping());
    match (track, tip) {
        (Some(a), Some(b)) => {
            Err(Error::Hypothesis(format!("contradictory certificates: {} tracks, {} tips", a.criterion, b.criterion)))
        }
        _ => Ok(()),
    }
}

/// Numerically computed special solutions `𝔞` and `𝔯` of the transition
/// equation, used as anchors by the tracking criteria.
///
/// The runs start at the ends of the pair window from `ã + Gamma` and
/// `r̃ + Gamma`. A second pair of runs started from `ã + gamma_-` and
/// `r̃ + gamma_+` measures how much the choice of seed still matters.
#[derive(Clone, Debug)]
pub struct Anchors {
    a: Trajectory,
    r: Trajectory,
    gamma: Transition,
    error: f64,
}

impl Anchors {
    pub fn compute(pair: &HyperbolicPair, gamma: &Transition, inner: (f64, f64), cfg: &IntegratorConfig) -> Result<Self> {
        let (w0, w1) = pair.window();
        if inner.0 < w0 || inner.1 > w1 {
            return Err(Error::InvalidParameter(format!("anchor span {inner:?} exceeds the pair window {:?}", (w0, w1))));
        }
        let g = pair.field().translate_by_transition(gamma);
        let a = integrate_span(&g, w0, pair.a(w0)? + gamma.eval(w0), w1, cfg)?;
        let r = integrate_span(&g, w1, pair.r(w1)? + gamma.eval(w1), w0, cfg)?;
        let a2 = integrate_span(&g, w0, pair.a(w0)? + gamma.gamma_minus(), w1, cfg)?;
        let r2 = integrate_span(&g, w1, pair.r(w1)? + gamma.gamma_plus(), w0, cfg)?;
        let mut error = 0f64;
        let n = (((inner.1 - inner.0) / 0.05).ceil() as usize).max(1);
        for i in 0..=n {
            let t = inner.0 + (inner.1 - inner.0) * i as f64 / n as f64;
            if let (Some(x), Some(y)) = (a.value(t), a2.value(t)) {
                error = error.max((x - y).abs());
            }
            if let (Some(x), Some(y)) = (r.value(t), r2.value(t)) {
                error = error.max((x - y).abs());
            }
        }
        Ok(Anchors { a, r, gamma: gamma.clone(), error: error + pair.error_budget() })
    }

    /// `𝔞(t) - Gamma(t)`, `-inf` once the run has escaped.
    pub fn a_offset(&self, t: f64) -> Result<f64> {
        offset(&self.a, &self.gamma, t, f64::NEG_INFINITY)
    }

    /// `𝔯(t) - Gamma(t)`, `+inf` once the backward run has escaped.
    pub fn r_offset(&self, t: f64) -> Result<f64> {
        offset(&self.r, &self.gamma, t, f64::INFINITY)
    }

    pub fn error(&self) -> f64 {
        self.error
    }

    pub fn attractive(&self) -> &Trajectory {
        &self.a
    }

    pub fn repulsive(&self) -> &Trajectory {
        &self.r
    }
}

fn offset(tr: &Trajectory, gamma: &Transition, t: f64, escaped: f64) -> Result<f64> {
    match tr.value(t) {
        Some(x) => Ok(x - gamma.eval(t)),
        None if tr.blow_up().is_some() => Ok(escaped),
        None => {
            let (lo, hi) = tr.span();
            Err(Error::OutOfSpan { t, lo, hi })
        }
    }
}

/// Unperturbed pair and anchors for one problem, prepared for a search
/// window of the criteria.
#[derive(Clone, Debug)]
pub struct Instance {
    pub pair: HyperbolicPair,
    pub anchors: Anchors,
    pub gamma: Transition,
    pub search: (f64, f64),
}

impl Instance {
    /// The pair window extends the search window by `pad` on each side.
    pub fn prepare(f: &ScalarField, gamma: &Transition, search: (f64, f64), pad: f64, cfg: &PairConfig) -> Result<Self> {
        let window = (search.0 - pad, search.1 + pad);
        let pair = attractor_repeller(f, window, cfg)?;
        let anchors = Anchors::compute(&pair, gamma, search, &cfg.integrator)?;
        Ok(Instance { pair, anchors, gamma: gamma.clone(), search })
    }

    pub fn piecewise(&self) -> Result<Piecewise<'_>> {
        Piecewise::new(&self.pair, &self.gamma, Some(&self.anchors), self.search)
    }
}

/// Default half-width of the search window for transitions `Gamma(c t)`.
pub fn search_half_width(c: f64) -> f64 {
    if c.is_finite() && c > 0.0 {
        (80.0 / c).max(30.0)
    } else {
        30.0
    }
}

/// Runs the piecewise ladders: tracking first, then tipping for
/// nondecreasing transitions; each stops at its first firing certificate.
pub fn certify_piecewise(inst: &Instance) -> Result<Vec<Certificate>> {
    let pw = inst.piecewise()?;
    let mut out = Vec::new();
    let mut ladder = Vec::new();
    if inst.gamma.monotone().is_nonincreasing() {
        ladder.push(TrackingStrategy::Nonincreasing);
    }
    ladder.push(TrackingStrategy::Remark57 { nus: nu_grid(0.01, 0.49, 25) });
    ladder.push(TrackingStrategy::Chain(NuSchedule::ConstantScan(nu_grid(0.05, 0.95, 19))));
    ladder.push(TrackingStrategy::Chain(NuSchedule::RampScan(nu_grid(0.05, 0.45, 9))));
    for s in ladder {
        let c = check_piecewise_tracking(&pw, &s)?;
        let fired = c.fired();
        out.push(c);
        if fired {
            break;
        }
    }
    if inst.gamma.monotone().is_nondecreasing() && !out.iter().any(Certificate::fired) {
        for s in [TippingStrategy::OneStep, TippingStrategy::TwoStepShift, TippingStrategy::SeveralSteps] {
            let c = check_piecewise_tipping(&pw, &s)?;
            let fired = c.fired();
            out.push(c);
            if fired {
                break;
            }
        }
    }
    check_consistency(&out)?;
    Ok(out)
}

/// Runs the continuous ladder for the quadratic family: the slope bound
/// (when `lambda*(0, p)` is supplied), the `b^{1/2}` form, the `alpha`
/// forms, and for nondecreasing transitions the tipping interval search.
pub fn certify_continuous(inst: &Instance, lambda0: Option<&LambdaStar>) -> Result<Vec<Certificate>> {
    let mut out = Vec::new();
    let fired = |out: &Vec<Certificate>| out.last().is_some_and(Certificate::fired);
    if let Some(l0) = lambda0 {
        out.push(check_slope_bound(l0, &inst.gamma, inst.search)?);
    }
    for v in [ContinuousVariant::Half, ContinuousVariant::AlphaScan(nu_grid(0.05, 0.45, 9))] {
        if fired(&out) {
            break;
        }
        out.push(check_continuous_tracking(&inst.pair, &inst.gamma, &inst.anchors, &v, inst.search)?);
    }
    if !fired(&out) && inst.gamma.monotone().is_nondecreasing() {
        out.push(search_continuous_tipping(&inst.pair, &inst.gamma, inst.search)?);
    }
    check_consistency(&out)?;
    Ok(out)
}

/// Polygonal ladder in the order `Thm6.12-*`, `Cor6.14-i/ii`, `Prop6.13`, `Cor6.14-iii`,
/// stopping at the first firing certificate.
pub fn certify_polygonal(pair: &HyperbolicPair, c: f64, d: f64) -> Result<Vec<Certificate>> {
    let all = polygonal_certificates(pair, c, d)?;
    let mut out = Vec::new();
    for cert in all {
        let fired = cert.fired();
        out.push(cert);
        if fired {
            break;
        }
    }
    Ok(out)
}

/// Evenly spaced grid of `n` values on `[a, b]`.
pub fn nu_grid(a: f64, b: f64, n: usize) -> Vec<f64> {
    if n <= 1 {
        return vec![a];
    }
    (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
}

/// Overall verdict of a bundle: the first firing certificate, if any.
pub fn bundle_verdict(certs: &[Certificate]) -> CertVerdict {
    certs.iter().find(|c| c.fired()).map(|c| c.verdict).unwrap_or(CertVerdict::NotApplicable)
}

#[cfg(test)]
mod tests;
