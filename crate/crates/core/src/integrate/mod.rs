//! Adaptive Dormand–Prince 5(4) integration with dense output.
//!
//! Steps never cross a knot of the field; stage times at a knot are nudged
//! into the open step interval so every step sees a single smooth piece.
//! Backward integration uses negative steps. Escape beyond the field's
//! thresholds is reported as data, not as an error.

mod trajectory;

pub use trajectory::{Constant, Curve, Segment, Trajectory};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fields::ScalarField;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IntegratorConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_step: f64,
    pub min_step: f64,
    pub max_steps: usize,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        IntegratorConfig { rel_tol: 1e-9, abs_tol: 1e-11, max_step: 0.5, min_step: 1e-13, max_steps: 50_000_000 }
    }
}

impl IntegratorConfig {
    pub fn with_tol(rel_tol: f64) -> Self {
        IntegratorConfig { rel_tol, abs_tol: rel_tol * 1e-2, ..Default::default() }
    }

    /// Rough bound on the global error of a solution of size `scale`.
    pub fn error_scale(&self, scale: f64) -> f64 {
        10.0 * (self.abs_tol + self.rel_tol * scale.abs().max(1.0))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EscapeDirection {
    /// Below the lower threshold with the field pointing down.
    Down,
    /// Above the upper threshold with the field pointing up.
    Up,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlowUp {
    pub direction: EscapeDirection,
    /// Times of the last two accepted steps, in integration order.
    pub bracket: (f64, f64),
    pub state: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum FlowResult {
    Reached(f64),
    Escaped(BlowUp),
}

impl FlowResult {
    pub fn state(&self) -> Option<f64> {
        match self {
            FlowResult::Reached(x) => Some(*x),
            FlowResult::Escaped(_) => None,
        }
    }

    /// The state, with escape mapped to the matching infinity.
    pub fn extended(&self) -> f64 {
        match self {
            FlowResult::Reached(x) => *x,
            FlowResult::Escaped(b) => match b.direction {
                EscapeDirection::Down => f64::NEG_INFINITY,
                EscapeDirection::Up => f64::INFINITY,
            },
        }
    }
}

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;
const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

fn nudge(t: f64) -> f64 {
    1e-11 * (1.0 + t.abs())
}

struct Stepper<'a> {
    f: &'a ScalarField,
}

struct StepOut {
    y1: f64,
    k7: f64,
    err: f64,
    rcont: [f64; 5],
}

impl Stepper<'_> {
    fn rhs(&self, t: f64, y: f64) -> Result<f64> {
        let v = self.f.eval(t, y);
        if v.is_finite() {
            Ok(v)
        } else if y.is_finite() {
            Err(Error::Domain(format!("field {} not finite at (t, x) = ({t}, {y})", self.f.name())))
        } else {
            Err(Error::NonFinite { t })
        }
    }

    /// One trial step. `lo`/`hi` request nudging of the stage times at the
    /// step ends into the open interval.
    fn step(&self, t: f64, y: f64, h: f64, k1: f64, hi: bool, cfg: &IntegratorConfig) -> Result<StepOut> {
        let s = h.signum();
        let end = |c: f64| {
            if hi && c == 1.0 {
                t + h - s * nudge(t + h).min(0.25 * h.abs())
            } else {
                t + c * h
            }
        };
        let k2 = self.rhs(t + C2 * h, y + h * A21 * k1)?;
        let k3 = self.rhs(t + C3 * h, y + h * (A31 * k1 + A32 * k2))?;
        let k4 = self.rhs(t + C4 * h, y + h * (A41 * k1 + A42 * k2 + A43 * k3))?;
        let k5 = self.rhs(t + C5 * h, y + h * (A51 * k1 + A52 * k2 + A53 * k3 + A54 * k4))?;
        let k6 = self.rhs(end(1.0), y + h * (A61 * k1 + A62 * k2 + A63 * k3 + A64 * k4 + A65 * k5))?;
        let y1 = y + h * (A71 * k1 + A73 * k3 + A74 * k4 + A75 * k5 + A76 * k6);
        let k7 = self.rhs(end(1.0), y1)?;
        let e = h * (E1 * k1 + E3 * k3 + E4 * k4 + E5 * k5 + E6 * k6 + E7 * k7);
        let sc = cfg.abs_tol + cfg.rel_tol * y.abs().max(y1.abs());
        let ydiff = y1 - y;
        let bspl = h * k1 - ydiff;
        let rcont = [
            y,
            ydiff,
            bspl,
            ydiff - h * k7 - bspl,
            h * (D1 * k1 + D3 * k3 + D4 * k4 + D5 * k5 + D6 * k6 + D7 * k7),
        ];
        Ok(StepOut { y1, k7, err: (e / sc).abs(), rcont })
    }
}

struct Run {
    t: f64,
    y: f64,
    blow_up: Option<BlowUp>,
}

fn run(
    f: &ScalarField,
    s: f64,
    x0: f64,
    t_end: f64,
    cfg: &IntegratorConfig,
    mut sink: Option<&mut Vec<Segment>>,
) -> Result<Run> {
    if !x0.is_finite() || !s.is_finite() || !t_end.is_finite() {
        return Err(Error::InvalidParameter("initial data and end time must be finite".into()));
    }
    let st = Stepper { f };
    let dir = if t_end >= s { 1.0 } else { -1.0 };
    let mut t = s;
    let mut y = x0;
    if t == t_end {
        return Ok(Run { t, y, blow_up: None });
    }
    let knots = f.knots();
    let start_on_knot = knots.contains(t);
    let mut k1 = st.rhs(if start_on_knot { t + dir * nudge(t) } else { t }, y)?;
    let mut h = dir * cfg.max_step.min(0.01 * (1.0 + y.abs()) / (k1.abs() + 1e-3)).max(1e-6).min((t_end - t).abs());
    let end_on_knot = knots.contains(t_end);
    let mut steps = 0usize;
    loop {
        let remaining = t_end - t;
        if remaining * dir <= 0.0 {
            break;
        }
        let next_knot = knots.next_after(t, dir).filter(|k| (k - t_end) * dir < 0.0);
        let target = next_knot.unwrap_or(t_end);
        let dist = (target - t).abs();
        let mut hi = next_knot.is_some() || end_on_knot;
        let mut hh = h.abs().min(cfg.max_step);
        if hh >= dist {
            hh = dist;
        } else {
            hi = false;
            // avoid a sliver step right before the target
            if hh > 0.5 * dist {
                hh = 0.5 * dist;
            }
        }
        if dist <= 2.0 * nudge(target) {
            // already at the knot up to round-off
            t = target;
            k1 = st.rhs(t + dir * nudge(t), y)?;
            continue;
        }
        let hs = dir * hh;
        let out = st.step(t, y, hs, k1, hi, cfg)?;
        steps += 1;
        if steps > cfg.max_steps {
            return Err(Error::StepUnderflow { t, h: hs });
        }
        if !out.y1.is_finite() {
            return Err(Error::NonFinite { t: t + hs });
        }
        if out.err <= 1.0 {
            let t1 = if hh == dist { target } else { t + hs };
            if let Some(v) = sink.as_deref_mut() {
                v.push(Segment::new(t, t1 - t, out.rcont));
            }
            let t0 = t;
            t = t1;
            y = out.y1;
            let fac = if out.err == 0.0 { 5.0 } else { (0.9 * out.err.powf(-0.2)).clamp(0.2, 5.0) };
            h = dir * (hh * fac).max(cfg.min_step);
            if hi && t1 == target {
                k1 = st.rhs(t + dir * nudge(t), y)?;
            } else {
                k1 = out.k7;
            }
            let v = dir * k1;
            if y < f.escape_lower() && v < 0.0 || y > f.escape_upper() && v > 0.0 {
                let direction = if y < f.escape_lower() { EscapeDirection::Down } else { EscapeDirection::Up };
                return Ok(Run { t, y, blow_up: Some(BlowUp { direction, bracket: (t0, t), state: y }) });
            }
        } else {
            let fac = (0.9 * out.err.powf(-0.2)).clamp(0.1, 0.9);
            let hn = hh * fac;
            if hn < cfg.min_step {
                return Err(Error::StepUnderflow { t, h: hn });
            }
            h = dir * hn;
        }
    }
    Ok(Run { t, y, blow_up: None })
}

/// Evolution `x(t, s, x0)`; escape is returned as [`FlowResult::Escaped`].
pub fn flow(f: &ScalarField, t: f64, s: f64, x0: f64, cfg: &IntegratorConfig) -> Result<FlowResult> {
    let r = run(f, s, x0, t, cfg, None)?;
    Ok(match r.blow_up {
        Some(b) => FlowResult::Escaped(b),
        None => FlowResult::Reached(r.y),
    })
}

/// Solution from `(s, x0)` up to `t_end` (either direction) with dense output.
pub fn integrate_span(f: &ScalarField, s: f64, x0: f64, t_end: f64, cfg: &IntegratorConfig) -> Result<Trajectory> {
    let mut segs = Vec::new();
    let r = run(f, s, x0, t_end, cfg, Some(&mut segs))?;
    Ok(Trajectory::from_segments(s, x0, r.t, r.y, segs, r.blow_up))
}
