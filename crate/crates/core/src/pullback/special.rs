//! Locally pullback attractive and repulsive solutions of the transition
//! equation `x' = f(t, x - Gamma(t))`.

use super::HyperbolicPair;
use crate::error::{Error, Result};
use crate::fields::{ScalarField, Transition};
use crate::integrate::{flow, integrate_span, FlowResult, IntegratorConfig, Trajectory};

/// How the pullback runs are started.
#[derive(Clone, Copy, Debug)]
pub enum Seeding<'a> {
    /// From `ã + Gamma` and `r̃ + Gamma` at the ends of the pair window.
    Pair(&'a HyperbolicPair),
    /// From the transition field's own seeds, `burn_in` before the span.
    Coercive { burn_in: f64 },
}

impl Seeding<'_> {
    fn starts(&self, g: &ScalarField, gamma: &Transition, span: (f64, f64)) -> Result<((f64, f64), (f64, f64))> {
        let (lo, hi) = span;
        Ok(match self {
            Seeding::Pair(p) => {
                let (a, b) = p.window();
                if lo < a || hi > b {
                    return Err(Error::InvalidParameter(format!("span {span:?} exceeds the pair window {:?}", p.window())));
                }
                ((a, p.a(a)? + gamma.eval(a)), (b, p.r(b)? + gamma.eval(b)))
            }
            Seeding::Coercive { burn_in } => ((lo - burn_in, g.upper_seed()), (hi + burn_in, g.lower_seed())),
        })
    }
}

#[derive(Clone, Debug)]
pub struct SpecialSolutions {
    /// Forward run; truncated at escape.
    pub a: Trajectory,
    /// Backward run; truncated at escape.
    pub r: Trajectory,
    pub t0: f64,
    /// `a(t0) - r(t0)`, or `-inf` when either run escaped before `t0`.
    pub gap: f64,
}

impl SpecialSolutions {
    pub fn a_at(&self, t: f64) -> Option<f64> {
        self.a.value(t)
    }

    pub fn r_at(&self, t: f64) -> Option<f64> {
        self.r.value(t)
    }

    pub fn a_escaped(&self) -> bool {
        self.a.blow_up().is_some()
    }

    pub fn r_escaped(&self) -> bool {
        self.r.blow_up().is_some()
    }
}

/// Dense runs of both special solutions of `x' = f(t, x - Gamma(t))` over `span`.
pub fn special_solutions(
    f: &ScalarField,
    gamma: &Transition,
    seeding: Seeding<'_>,
    span: (f64, f64),
    t0: f64,
    cfg: &IntegratorConfig,
) -> Result<SpecialSolutions> {
    if !(span.0 < span.1) || t0 < span.0 || t0 > span.1 {
        return Err(Error::InvalidParameter(format!("comparison time {t0} outside span {span:?}")));
    }
    let g = f.translate_by_transition(gamma);
    let ((sa, xa), (sr, xr)) = seeding.starts(&g, gamma, span)?;
    let a = integrate_span(&g, sa, xa, span.1, cfg)?;
    let r = integrate_span(&g, sr, xr, span.0, cfg)?;
    let gap = match (a.value(t0), r.value(t0)) {
        (Some(x), Some(y)) if a.covers(t0) && r.covers(t0) => x - y,
        _ => f64::NEG_INFINITY,
    };
    Ok(SpecialSolutions { a, r, t0, gap })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PullbackValues {
    pub a: FlowResult,
    pub r: Option<FlowResult>,
    pub gap: f64,
}

/// Values of the special solutions at `t0` only; the repulsive run is
/// skipped when the attractive one escapes.
pub fn pullback_values(
    g: &ScalarField,
    gamma: &Transition,
    seeding: Seeding<'_>,
    span: (f64, f64),
    t0: f64,
    cfg: &IntegratorConfig,
) -> Result<PullbackValues> {
    let ((sa, xa), (sr, xr)) = seeding.starts(g, gamma, span)?;
    let a = flow(g, t0, sa, xa, cfg)?;
    if a.state().is_none() {
        return Ok(PullbackValues { a, r: None, gap: f64::NEG_INFINITY });
    }
    let r = flow(g, t0, sr, xr, cfg)?;
    let gap = match (a.state(), r.state()) {
        (Some(x), Some(y)) => x - y,
        _ => f64::NEG_INFINITY,
    };
    Ok(PullbackValues { a, r: Some(r), gap })
}

/// `(t1*, t2*)`: the last grid time up to which `a - Gamma > b^nu1` holds at
/// every grid time, and the first grid time from which `r - Gamma < b^nu2`
/// holds at every grid time.
pub fn entry_exit_times(
    pair: &HyperbolicPair,
    gamma: &Transition,
    sp: &SpecialSolutions,
    nu1: f64,
    nu2: f64,
    grid: &[f64],
) -> Result<(f64, f64)> {
    let mut t1 = None;
    for &t in grid {
        let ok = match sp.a_at(t) {
            Some(x) if sp.a.covers(t) => x - gamma.eval(t) > pair.blend(nu1, t)?,
            _ => false,
        };
        if !ok {
            break;
        }
        t1 = Some(t);
    }
    let mut t2 = None;
    for &t in grid.iter().rev() {
        let ok = match sp.r_at(t) {
            Some(x) if sp.r.covers(t) => x - gamma.eval(t) < pair.blend(nu2, t)?,
            _ => false,
        };
        if !ok {
            break;
        }
        t2 = Some(t);
    }
    match (t1, t2) {
        (Some(a), Some(b)) => Ok((a, b)),
        _ => Err(Error::Hypothesis("anchors do not hold at the ends of the grid".into())),
    }
}
