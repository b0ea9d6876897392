//! Criteria for continuous transitions of the quadratic family
//! `x' = -(x - Gamma(t))^2 + p(t)`.

use super::{best_of, Anchors, CertVerdict, Certificate, Inequality};
use crate::bifurcation::LambdaStar;
use crate::error::{Error, Result};
use crate::fields::Transition;
use crate::pullback::HyperbolicPair;

/// Points of the dense grid used for pointwise inequalities on an interval.
const GRID: usize = 1000;
/// Spacing of the grid on which anchor times are searched.
const ANCHOR_DT: f64 = 0.05;

#[derive(Clone, Debug, PartialEq)]
pub enum ContinuousVariant {
    /// `(1/4)(ã - r̃)^2 > Gamma'` with `b^{1/2}` anchors.
    Half,
    /// Linear `nu` ramp of half-width `alpha`.
    Alpha(f64),
    /// Best `alpha` of a grid.
    AlphaScan(Vec<f64>),
}

fn derivative(gamma: &Transition, t: f64) -> Result<f64> {
    gamma.derivative(t).ok_or_else(|| Error::Hypothesis(format!("transition {} has no derivative", gamma.name())))
}

/// `(sup Gamma', argmax, largest change between neighbouring samples)` on
/// `n + 1` points of `[a, b]`.
pub fn slope_sup(gamma: &Transition, window: (f64, f64), n: usize) -> Result<(f64, f64, f64)> {
    let (a, b) = window;
    let mut sup = f64::NEG_INFINITY;
    let mut arg = a;
    let mut modulus = 0f64;
    let mut prev: Option<f64> = None;
    for i in 0..=n {
        let t = a + (b - a) * i as f64 / n as f64;
        let d = derivative(gamma, t)?;
        if d > sup {
            sup = d;
            arg = t;
        }
        if let Some(p) = prev {
            modulus = modulus.max((d - p).abs());
        }
        prev = Some(d);
    }
    Ok((sup, arg, modulus))
}

/// Tracking from `lambda*(0, p) <= -sup Gamma'`, with `lambda*(0, p)` read
/// from the upper end of its bisection bracket.
pub fn check_slope_bound(lambda0: &LambdaStar, gamma: &Transition, window: (f64, f64)) -> Result<Certificate> {
    let (sup, arg, modulus) = slope_sup(gamma, window, 20 * GRID)?;
    let mut cert = Certificate::new("Prop6.5", modulus)
        .param("lambda_star_unperturbed", lambda0.value)
        .param("sup_slope", sup)
        .param("argmax", arg);
    cert.inequalities.push(Inequality::leq(lambda0.bracket.1, -sup));
    Ok(cert.settle(CertVerdict::Tracking))
}

/// Interval `[t1, t2]` for anchors `𝔞 - Gamma > b^{nu_a}` at `t1` and
/// `𝔯 - Gamma < b^{nu_r}` at `t2`, as tight as the sampled runs allow.
fn anchor_interval(
    pair: &HyperbolicPair,
    anchors: &Anchors,
    nu_a: f64,
    nu_r: f64,
    search: (f64, f64),
    budget: f64,
) -> Result<Option<(f64, f64)>> {
    let n = (((search.1 - search.0) / ANCHOR_DT).ceil() as usize).max(2);
    let grid: Vec<f64> = (0..=n).map(|i| search.0 + (search.1 - search.0) * i as f64 / n as f64).collect();
    let mut entry = None;
    for &t in &grid {
        if anchors.a_offset(t)? - pair.blend(nu_a, t)? > budget {
            entry = Some(t);
        } else {
            break;
        }
    }
    let mut exit = None;
    for &t in grid.iter().rev() {
        if pair.blend(nu_r, t)? - anchors.r_offset(t)? > budget {
            exit = Some(t);
        } else {
            break;
        }
    }
    // When the runs overlap both anchors hold on `[exit, entry]`.
    let step = grid[1] - grid[0];
    Ok(match (entry, exit) {
        (Some(a), Some(b)) if a < b => Some((a, b)),
        (Some(a), Some(b)) if a > b => Some((b, a)),
        (Some(_), Some(b)) if b + step <= search.1 => Some((b, b + step)),
        (Some(_), Some(b)) => Some((b - step, b)),
        _ => None,
    })
}

fn dense(t1: f64, t2: f64) -> impl Iterator<Item = f64> {
    (0..=GRID).map(move |i| t1 + (t2 - t1) * i as f64 / GRID as f64)
}

/// Half the largest change of the slack between neighbouring grid points:
/// the slack between samples can dip at most this far below them.
pub(crate) fn grid_modulus(qs: &[Inequality]) -> f64 {
    0.5 * qs.windows(2).map(|w| (w[1].slack - w[0].slack).abs()).filter(|d| d.is_finite()).fold(0.0, f64::max)
}

fn continuous_alpha(
    pair: &HyperbolicPair,
    gamma: &Transition,
    anchors: &Anchors,
    alpha: Option<f64>,
    search: (f64, f64),
    interval: Option<(f64, f64)>,
) -> Result<Certificate> {
    let (name, nu_a, nu_r) = match alpha {
        None => ("Thm6.8", 0.5, 0.5),
        Some(a) if 0.0 < a && a < 0.5 => ("Thm6.9", 0.5 + a, 0.5 - a),
        Some(a) => return Err(Error::InvalidParameter(format!("alpha must lie in (0, 1/2), got {a}"))),
    };
    derivative(gamma, 0.0)?;
    let budget = anchors.error().max(pair.error_budget());
    let mut cert = Certificate::new(name, budget).param("anchors", "numerical");
    if let Some(a) = alpha {
        cert.set("alpha", a);
    }
    let found = match interval {
        Some(iv) => Some(iv),
        None => anchor_interval(pair, anchors, nu_a, nu_r, search, budget)?,
    };
    let Some((t1, t2)) = found else {
        return Ok(cert.inapplicable("anchors not found"));
    };
    cert.set("t1", t1);
    cert.set("t2", t2);
    let len = t2 - t1;
    let mut pointwise = Vec::with_capacity(GRID + 1);
    for t in dense(t1, t2) {
        let s = pair.separation(t)?;
        let lhs = match alpha {
            None => 0.25 * s * s,
            Some(a) => {
                let u = (t2 + t1 - 2.0 * t) / len;
                (0.25 - a * a * u * u) * s * s + 2.0 * a / len * s
            }
        };
        pointwise.push(Inequality::geq(lhs, derivative(gamma, t)?));
    }
    cert.error_budget += grid_modulus(&pointwise);
    cert.inequalities.push(Inequality::geq(anchors.a_offset(t1)?, pair.blend(nu_a, t1)?));
    cert.inequalities.push(Inequality::leq(anchors.r_offset(t2)?, pair.blend(nu_r, t2)?));
    cert.inequalities.extend(pointwise);
    Ok(cert.settle(CertVerdict::Tracking))
}

/// Tracking certificates for `h = 0` (and small `h`) in the quadratic
/// family. Anchor times come from the sampled special solutions.
pub fn check_continuous_tracking(
    pair: &HyperbolicPair,
    gamma: &Transition,
    anchors: &Anchors,
    variant: &ContinuousVariant,
    search: (f64, f64),
) -> Result<Certificate> {
    match variant {
        ContinuousVariant::Half => continuous_alpha(pair, gamma, anchors, None, search, None),
        ContinuousVariant::Alpha(a) => continuous_alpha(pair, gamma, anchors, Some(*a), search, None),
        ContinuousVariant::AlphaScan(grid) => {
            let mut out = Vec::new();
            for &a in grid {
                let c = continuous_alpha(pair, gamma, anchors, Some(a), search, None)?;
                let fired = c.fired();
                out.push(c);
                if fired {
                    break;
                }
            }
            best_of(out).ok_or_else(|| Error::InvalidParameter("empty alpha grid".into()))
        }
    }
}

/// Tracking certificate on a given interval `[t1, t2]`; `alpha = None`
/// selects the `b^{1/2}` form.
pub fn check_continuous_tracking_on(
    pair: &HyperbolicPair,
    gamma: &Transition,
    anchors: &Anchors,
    alpha: Option<f64>,
    t1: f64,
    t2: f64,
) -> Result<Certificate> {
    if !(t1 < t2) {
        return Err(Error::InvalidParameter(format!("need t1 < t2, got [{t1}, {t2}]")));
    }
    continuous_alpha(pair, gamma, anchors, alpha, (t1, t2), Some((t1, t2)))
}

/// Tipping certificate on `[t1, t2]` for a nondecreasing transition.
pub fn check_continuous_tipping(pair: &HyperbolicPair, gamma: &Transition, t1: f64, t2: f64) -> Result<Certificate> {
    if !gamma.monotone().is_nondecreasing() {
        return Err(Error::Hypothesis("continuous tipping needs a nondecreasing transition".into()));
    }
    if !(t1 < t2) {
        return Err(Error::InvalidParameter(format!("need t1 < t2, got [{t1}, {t2}]")));
    }
    let len = t2 - t1;
    let mut cert = Certificate::new("Thm6.10", pair.error_budget()).param("t1", t1).param("t2", t2);
    for t in dense(t1, t2) {
        let s = pair.separation(t)?;
        let u = (t1 + t2 - 2.0 * t) / len;
        let lhs = (0.25 - 0.25 * u * u) * s * s + s / len;
        cert.inequalities.push(Inequality::leq(lhs, derivative(gamma, t)?));
    }
    cert.error_budget += grid_modulus(&cert.inequalities);
    Ok(cert.settle(CertVerdict::TippingNoBounded))
}

/// Scans intervals centred near the steepest point of `Gamma`.
pub fn search_continuous_tipping(pair: &HyperbolicPair, gamma: &Transition, search: (f64, f64)) -> Result<Certificate> {
    let (_, arg, _) = slope_sup(gamma, search, 20 * GRID)?;
    let (w0, w1) = pair.window();
    let width = search.1 - search.0;
    let lens: Vec<f64> = (0..40).map(|i| 0.02 * (width / 0.02).powf(i as f64 / 39.0)).collect();
    let mut out = Vec::new();
    for &len in &lens {
        for k in -4..=4 {
            let m = arg + k as f64 * len / 8.0;
            let (t1, t2) = (m - 0.5 * len, m + 0.5 * len);
            if t1 < w0 || t2 > w1 {
                continue;
            }
            let c = check_continuous_tipping(pair, gamma, t1, t2)?;
            if c.fired() {
                return Ok(c);
            }
            out.push(c);
        }
    }
    best_of(out).ok_or_else(|| Error::Hypothesis("no candidate interval inside the pair window".into()))
}
