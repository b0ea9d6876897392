//! Attractor–repeller pairs, locally pullback attractive/repulsive
//! solutions, convex combinations and dichotomy constants.

mod special;

pub use special::{entry_exit_times, pullback_values, special_solutions, PullbackValues, Seeding, SpecialSolutions};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fields::ScalarField;
use crate::integrate::{flow, integrate_span, Curve, FlowResult, IntegratorConfig, Trajectory};

/// Exponential dichotomy constants `(k, beta)` on a sample grid.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Dichotomy {
    pub k: f64,
    pub beta: f64,
    pub attractive: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PairConfig {
    /// Distance by which the seeds precede the window on each side.
    pub horizon: f64,
    /// Accepted change on the window when the horizon is doubled.
    pub tail_tol: f64,
    /// Run the horizon-doubling check.
    pub check_doubling: bool,
    /// Further doublings tried before the check gives up.
    pub max_doublings: u32,
    pub integrator: IntegratorConfig,
}

impl Default for PairConfig {
    fn default() -> Self {
        PairConfig { horizon: 60.0, tail_tol: 1e-7, check_doubling: true, max_doublings: 3, integrator: IntegratorConfig::default() }
    }
}

/// Hyperbolic attractor `ã` above repeller `r̃` on a window.
#[derive(Clone, Debug)]
pub struct HyperbolicPair {
    field: ScalarField,
    attractor: Trajectory,
    repeller: Trajectory,
    window: (f64, f64),
    min_separation: f64,
    tail_error: f64,
    integrator: IntegratorConfig,
}

fn pair_runs(f: &ScalarField, window: (f64, f64), horizon: f64, cfg: &IntegratorConfig) -> Result<(Trajectory, Trajectory)> {
    let (a, b) = window;
    let at = integrate_span(f, a - horizon, f.upper_seed(), b, cfg)?;
    if let Some(bu) = at.blow_up() {
        return Err(Error::NoPair(format!("attractor candidate escaped near t = {}", bu.bracket.1)));
    }
    let rt = integrate_span(f, b + horizon, f.lower_seed(), a, cfg)?;
    if let Some(bu) = rt.blow_up() {
        return Err(Error::NoPair(format!("repeller candidate escaped near t = {}", bu.bracket.1)));
    }
    Ok((at, rt))
}

fn grid(a: f64, b: f64, dt: f64) -> Vec<f64> {
    let n = ((b - a) / dt).ceil().max(1.0) as usize;
    (0..=n).map(|i| a + (b - a) * i as f64 / n as f64).collect()
}

/// Computes `(ã, r̃)` on `window` by forward and backward pullback from the
/// field's seeds.
pub fn attractor_repeller(f: &ScalarField, window: (f64, f64), cfg: &PairConfig) -> Result<HyperbolicPair> {
    let (a, b) = window;
    if !(a < b) {
        return Err(Error::InvalidParameter(format!("empty window [{a}, {b}]")));
    }
    let (mut at, mut rt) = pair_runs(f, window, cfg.horizon, &cfg.integrator)?;
    let mut tail_error = 0.0;
    if cfg.check_doubling {
        let mut horizon = cfg.horizon;
        let mut k = 0;
        loop {
            horizon *= 2.0;
            let (at2, rt2) = pair_runs(f, window, horizon, &cfg.integrator)?;
            tail_error = 0.0;
            for t in grid(a, b, 0.05) {
                let da = (at.value_at(t)? - at2.value_at(t)?).abs();
                let dr = (rt.value_at(t)? - rt2.value_at(t)?).abs();
                tail_error = f64::max(tail_error, da.max(dr));
            }
            at = at2;
            rt = rt2;
            if tail_error <= cfg.tail_tol {
                break;
            }
            if k == cfg.max_doublings {
                return Err(Error::NoConvergence(format!(
                    "horizon doubling changed the pair by {tail_error:e} > {:e}",
                    cfg.tail_tol
                )));
            }
            k += 1;
        }
    }
    let mut min_sep = f64::INFINITY;
    let mut times = at.sample_times();
    times.extend(rt.sample_times());
    for t in times.into_iter().filter(|t| *t >= a && *t <= b) {
        min_sep = min_sep.min(at.value_at(t)? - rt.value_at(t)?);
    }
    if !(min_sep > 0.0) {
        return Err(Error::NoPair(format!("attractor and repeller candidates meet (min separation {min_sep:e})")));
    }
    Ok(HyperbolicPair {
        field: f.clone(),
        attractor: at,
        repeller: rt,
        window,
        min_separation: min_sep,
        tail_error,
        integrator: cfg.integrator,
    })
}

impl HyperbolicPair {
    pub fn field(&self) -> &ScalarField {
        &self.field
    }

    pub fn attractor(&self) -> &Trajectory {
        &self.attractor
    }

    pub fn repeller(&self) -> &Trajectory {
        &self.repeller
    }

    pub fn window(&self) -> (f64, f64) {
        self.window
    }

    pub fn min_separation(&self) -> f64 {
        self.min_separation
    }

    pub fn tail_error(&self) -> f64 {
        self.tail_error
    }

    pub fn integrator(&self) -> &IntegratorConfig {
        &self.integrator
    }

    fn check(&self, t: f64) -> Result<()> {
        let (lo, hi) = self.window;
        if t < lo - 1e-9 || t > hi + 1e-9 {
            Err(Error::OutOfSpan { t, lo, hi })
        } else {
            Ok(())
        }
    }

    pub fn a(&self, t: f64) -> Result<f64> {
        self.check(t)?;
        self.attractor.value_at(t)
    }

    pub fn r(&self, t: f64) -> Result<f64> {
        self.check(t)?;
        self.repeller.value_at(t)
    }

    /// `ã(t) - r̃(t)`.
    pub fn separation(&self, t: f64) -> Result<f64> {
        Ok(self.a(t)? - self.r(t)?)
    }

    /// `b^nu(t) = nu ã(t) + (1 - nu) r̃(t)`.
    pub fn blend(&self, nu: f64, t: f64) -> Result<f64> {
        if nu == 1.0 {
            return self.a(t);
        }
        if nu == 0.0 {
            return self.r(t);
        }
        Ok(nu * self.a(t)? + (1.0 - nu) * self.r(t)?)
    }

    /// `x(t, s, b^nu(s))` for the unperturbed field. The end values `nu = 0, 1`
    /// return the pair itself, which solves the equation.
    pub fn flow_from_blend(&self, nu: f64, s: f64, t: f64) -> Result<FlowResult> {
        if nu == 1.0 {
            return Ok(FlowResult::Reached(self.a(t)?));
        }
        if nu == 0.0 {
            return Ok(FlowResult::Reached(self.r(t)?));
        }
        flow(&self.field, t, s, self.blend(nu, s)?, &self.integrator)
    }

    /// Error budget for inequalities built from the pair and unperturbed flows.
    pub fn error_budget(&self) -> f64 {
        let scale = self.attractor.samples().iter().fold(1f64, |m, (_, x)| m.max(x.abs()));
        self.integrator.error_scale(scale) + self.tail_error
    }
}

/// `b^nu` as a curve.
pub struct Blend<'a> {
    pair: &'a HyperbolicPair,
    nu: f64,
}

pub fn convex_combination(pair: &HyperbolicPair, nu: f64) -> Result<Blend<'_>> {
    if !(0.0..=1.0).contains(&nu) {
        return Err(Error::InvalidParameter(format!("nu must lie in [0, 1], got {nu}")));
    }
    Ok(Blend { pair, nu })
}

impl Curve for Blend<'_> {
    fn value_at(&self, t: f64) -> Result<f64> {
        self.pair.blend(self.nu, t)
    }

    fn derivative_at(&self, t: f64) -> Result<f64> {
        let f = &self.pair.field;
        let (a, r) = (self.pair.a(t)?, self.pair.r(t)?);
        Ok(self.nu * f.eval(t, a) + (1.0 - self.nu) * f.eval(t, r))
    }
}

/// Smallest `h` on `[0, h_max]` with `x(s + h, s, b^nu1(s)) >= b^nu2(s + h)`
/// for every `s` of the grid. Valid on the tested grid only.
pub fn transfer_time(pair: &HyperbolicPair, nu1: f64, nu2: f64, s_grid: &[f64], h_max: f64) -> Result<f64> {
    if !(0.0 < nu1 && nu1 <= nu2 && nu2 < 1.0) {
        return Err(Error::InvalidParameter(format!("need 0 < nu1 <= nu2 < 1, got ({nu1}, {nu2})")));
    }
    if nu1 == nu2 {
        return Ok(0.0);
    }
    let cfg = *pair.integrator();
    let mut worst = 0f64;
    for &s in s_grid {
        let (_, hi) = pair.window;
        let end = (s + h_max).min(hi);
        let tr = integrate_span(&pair.field, s, pair.blend(nu1, s)?, end, &cfg)?;
        let phi = |t: f64| -> Result<f64> { Ok(tr.value_at(t)? - pair.blend(nu2, t)?) };
        let times: Vec<f64> = tr.sample_times();
        let mut found = None;
        for w in times.windows(2) {
            // subdivide each step to catch the first crossing
            let (t0, t1) = (w[0], w[1]);
            let m = 8;
            let mut prev = t0;
            for i in 1..=m {
                let t = t0 + (t1 - t0) * i as f64 / m as f64;
                if phi(t)? >= 0.0 {
                    let (mut lo, mut hi) = (prev, t);
                    for _ in 0..80 {
                        let mid = 0.5 * (lo + hi);
                        if phi(mid)? >= 0.0 {
                            hi = mid;
                        } else {
                            lo = mid;
                        }
                    }
                    found = Some(hi - s);
                    break;
                }
                prev = t;
            }
            if found.is_some() {
                break;
            }
        }
        match found {
            Some(h) => worst = worst.max(h),
            None => {
                return Err(Error::Hypothesis(format!("h_max = {h_max} insufficient at s = {s}")));
            }
        }
    }
    Ok(worst)
}

/// Dichotomy constants of the linearization along `b`.
///
/// `beta` is the worst average of `f_x(t, b(t))` over grid intervals of
/// length at least `min_len`; `k` then makes the exponential bound hold for
/// every pair of grid points.
pub fn dichotomy_estimate(f: &ScalarField, b: &dyn Curve, grid: &[f64], min_len: f64) -> Result<Dichotomy> {
    if grid.len() < 2 {
        return Err(Error::InvalidParameter("grid needs at least two points".into()));
    }
    let mut cum = vec![0.0; grid.len()];
    let mut prev = f.eval_dx(grid[0], b.value_at(grid[0])?);
    for i in 1..grid.len() {
        let (t0, t1) = (grid[i - 1], grid[i]);
        let tm = 0.5 * (t0 + t1);
        let fm = f.eval_dx(tm, b.value_at(tm)?);
        let f1 = f.eval_dx(t1, b.value_at(t1)?);
        cum[i] = cum[i - 1] + (t1 - t0) * (prev + 4.0 * fm + f1) / 6.0;
        prev = f1;
    }
    let n = grid.len();
    let (mut sup_avg, mut inf_avg) = (f64::NEG_INFINITY, f64::INFINITY);
    for i in 0..n {
        for j in i + 1..n {
            let len = grid[j] - grid[i];
            if len < min_len {
                continue;
            }
            let avg = (cum[j] - cum[i]) / len;
            sup_avg = sup_avg.max(avg);
            inf_avg = inf_avg.min(avg);
        }
    }
    if !sup_avg.is_finite() {
        return Err(Error::InvalidParameter("min_len exceeds the grid span".into()));
    }
    let (attractive, beta) = if sup_avg < 0.0 {
        (true, -sup_avg)
    } else if inf_avg > 0.0 {
        (false, inf_avg)
    } else {
        return Err(Error::NotHyperbolic(format!("averages of f_x range over [{inf_avg}, {sup_avg}]")));
    };
    // k = max over s < t of exp(± integral + beta (t - s))
    let mut logk = 0f64;
    let sgn = if attractive { 1.0 } else { -1.0 };
    let mut best_lo = f64::INFINITY;
    for i in 0..n {
        let g = sgn * cum[i] + beta * grid[i];
        best_lo = best_lo.min(g);
        logk = logk.max(g - best_lo);
    }
    Ok(Dichotomy { k: logk.exp(), beta, attractive })
}

/// `min(rho/2, beta eps / (2 k_f m_fx), (beta_f - beta) / l_fx)`.
#[allow(clippy::too_many_arguments)]
pub fn perturbation_radius(k_f: f64, beta_f: f64, beta: f64, rho: f64, m_fx: f64, l_fx: f64, eps: f64) -> Result<f64> {
    for (n, v) in [("k_f", k_f), ("beta_f", beta_f), ("beta", beta), ("rho", rho), ("m_fx", m_fx), ("l_fx", l_fx), ("eps", eps)] {
        if !(v > 0.0) {
            return Err(Error::InvalidParameter(format!("{n} must be positive, got {v}")));
        }
    }
    if !(beta < beta_f) {
        return Err(Error::InvalidParameter(format!("need beta < beta_f, got {beta} >= {beta_f}")));
    }
    Ok((0.5 * rho).min(beta * eps / (2.0 * k_f * m_fx)).min((beta_f - beta) / l_fx))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LowerSolutionReport {
    /// `min_t f(t, b(t)) - b'(t)` on the grid.
    pub margin: f64,
    pub at: f64,
    pub strict: bool,
}

/// Tests `b'(t) < f(t, b(t))` on a grid.
pub fn lower_solution_test(f: &ScalarField, b: &dyn Curve, grid: &[f64]) -> Result<LowerSolutionReport> {
    let mut margin = f64::INFINITY;
    let mut at = f64::NAN;
    for &t in grid {
        let m = f.eval(t, b.value_at(t)?) - b.derivative_at(t)?;
        if m < margin {
            margin = m;
            at = t;
        }
    }
    Ok(LowerSolutionReport { margin, at, strict: margin > 0.0 })
}

#[cfg(test)]
mod tests;
