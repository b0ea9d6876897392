//! Criteria for piecewise-constant transitions `Gamma^h`.

use serde_json::json;

use super::{best_of, Anchors, CertVerdict, Certificate, Inequality};
use crate::error::{Error, Result};
use crate::fields::Transition;
use crate::integrate::{flow, integrate_span};
use crate::pullback::{transfer_time, HyperbolicPair};

/// `nu` schedules for the chain criterion.
#[derive(Clone, Debug, PartialEq)]
pub enum NuSchedule {
    Constant(f64),
    /// Best constant schedule over a grid.
    ConstantScan(Vec<f64>),
    /// Linear ramp from `1/2 + alpha` down to `1/2 - alpha` between the
    /// lattice entry and exit times.
    Ramp { alpha: f64 },
    RampScan(Vec<f64>),
    /// `nus[0]` at `j0`, ..., `nus[n]` at `j0 + n`.
    Custom { j0: i64, nus: Vec<f64> },
}

#[derive(Clone, Debug, PartialEq)]
pub enum TrackingStrategy {
    /// `nu = 1/2` for nonincreasing transitions.
    Nonincreasing,
    /// Fixed `nu1 < nu2` with `h >= h_{nu1,nu2}` on the lattice.
    UniformNu { nu1: f64, nu2: f64 },
    /// `nu1 = nu`, `nu2 = 1 - nu` with the transfer inequality checked
    /// step by step; the best `nu` of the grid is kept.
    Remark57 { nus: Vec<f64> },
    /// `j0 = -1`, `n = 2`, `nu1 = 1/4`, `nu2 = 3/4`.
    TwoPoint,
    Chain(NuSchedule),
}

#[derive(Clone, Debug, PartialEq)]
pub enum TippingStrategy {
    OneStep,
    TwoStepNu { nus: Vec<f64> },
    /// Flow from `ã((j0+1)h) + Gamma(j0 h) - Gamma((j0+1)h)`.
    TwoStepShift,
    /// Integrates the transition equation from `ã + Gamma` at the start of
    /// the search window.
    SeveralSteps,
    /// General chain with `nus[0] = 1` and `nus[n] = 0`.
    Chain { j0: i64, nus: Vec<f64> },
}

/// Lattice view of a problem with transition `Gamma^h`.
pub struct Piecewise<'a> {
    pair: &'a HyperbolicPair,
    gamma: &'a Transition,
    anchors: Option<&'a Anchors>,
    h: f64,
    j_lo: i64,
    j_hi: i64,
}

impl<'a> Piecewise<'a> {
    /// `gamma` must be a discretized transition. Lattice indices are
    /// restricted to `search` and to two steps inside the pair window.
    pub fn new(
        pair: &'a HyperbolicPair,
        gamma: &'a Transition,
        anchors: Option<&'a Anchors>,
        search: (f64, f64),
    ) -> Result<Self> {
        let h = gamma
            .step_size()
            .ok_or_else(|| Error::InvalidParameter(format!("transition {} is not piecewise constant", gamma.name())))?;
        let (w0, w1) = pair.window();
        let j_lo = (search.0.max(w0) / h).ceil() as i64;
        let j_hi = ((search.1.min(w1 - 2.0 * h) / h).floor()) as i64;
        if j_hi <= j_lo {
            return Err(Error::InvalidParameter(format!("search window {search:?} holds no lattice step of size {h}")));
        }
        Ok(Piecewise { pair, gamma, anchors, h, j_lo, j_hi })
    }

    pub fn step_size(&self) -> f64 {
        self.h
    }

    pub fn index_range(&self) -> (i64, i64) {
        (self.j_lo, self.j_hi)
    }

    fn t(&self, j: i64) -> f64 {
        j as f64 * self.h
    }

    fn gam(&self, j: i64) -> f64 {
        self.gamma.eval(self.t(j))
    }

    fn jump(&self, j: i64) -> f64 {
        self.gam(j + 1) - self.gam(j)
    }

    fn sep(&self, j: i64) -> Result<f64> {
        self.pair.separation(self.t(j))
    }

    fn b(&self, nu: f64, j: i64) -> Result<f64> {
        self.pair.blend(nu, self.t(j))
    }

    /// `x((j+1)h, jh, b^nu(jh))` of the unperturbed field.
    fn step(&self, nu: f64, j: i64) -> Result<f64> {
        Ok(self.pair.flow_from_blend(nu, self.t(j), self.t(j + 1))?.extended())
    }

    fn anchors(&self) -> Result<&Anchors> {
        self.anchors.ok_or_else(|| Error::Hypothesis("tracking criteria need anchors".into()))
    }

    /// `𝔞_h(jh) - Gamma(jh) >= b^nu(jh)`.
    fn a_anchor(&self, nu: f64, j: i64) -> Result<Inequality> {
        Ok(Inequality::geq(self.anchors()?.a_offset(self.t(j))?, self.b(nu, j)?))
    }

    /// `𝔯_h(jh) - Gamma(jh) < b^nu(jh)`.
    fn r_anchor(&self, nu: f64, j: i64) -> Result<Inequality> {
        Ok(Inequality::leq(self.anchors()?.r_offset(self.t(j))?, self.b(nu, j)?))
    }

    fn tracking_budget(&self) -> Result<f64> {
        Ok(self.anchors()?.error().max(self.pair.error_budget()))
    }

    fn base(&self, criterion: &str, budget: f64) -> Certificate {
        Certificate::new(criterion, budget).param("h", self.h)
    }

    /// Finds `j0 < j1` with the `a` anchor at `j0`, the `r` anchor at `j1`
    /// and every step in between passing. Later starts are preferred, since
    /// their chains are shorter.
    fn scan_chain(
        &self,
        nu_a: f64,
        nu_r: f64,
        budget: f64,
        step: &dyn Fn(i64) -> Result<Vec<Inequality>>,
    ) -> Result<Option<(i64, i64, Vec<Inequality>)>> {
        let mut start: Option<(i64, Inequality)> = None;
        let mut chain: Vec<Inequality> = Vec::new();
        for j in self.j_lo..=self.j_hi {
            if let Some((s, qa)) = start {
                if j > s {
                    let qr = self.r_anchor(nu_r, j)?;
                    if qr.slack > budget {
                        let mut all = vec![qa];
                        all.append(&mut chain);
                        all.push(qr);
                        return Ok(Some((s, j, all)));
                    }
                }
            }
            let qa = self.a_anchor(nu_a, j)?;
            if qa.slack > budget {
                start = Some((j, qa));
                chain.clear();
            }
            if start.is_some() && j < self.j_hi {
                let qs = step(j)?;
                if qs.iter().all(|q| q.slack > budget) {
                    chain.extend(qs);
                } else {
                    start = None;
                    chain.clear();
                }
            }
        }
        Ok(None)
    }

    /// Last index of the initial run where the `a` anchor holds and first
    /// index of the final run where the `r` anchor holds.
    fn entry_exit(&self, nu_a: f64, nu_r: f64, budget: f64) -> Result<Option<(i64, i64)>> {
        let mut entry = None;
        for j in self.j_lo..=self.j_hi {
            if self.a_anchor(nu_a, j)?.slack > budget {
                entry = Some(j);
            } else {
                break;
            }
        }
        let mut exit = None;
        for j in (self.j_lo..=self.j_hi).rev() {
            if self.r_anchor(nu_r, j)?.slack > budget {
                exit = Some(j);
            } else {
                break;
            }
        }
        Ok(match (entry, exit) {
            (Some(a), Some(b)) if a < b => Some((a, b)),
            (Some(_), Some(b)) => {
                let j0 = (b - 1).max(self.j_lo);
                (j0 < self.j_hi).then_some((j0, j0 + 1))
            }
            _ => None,
        })
    }

    fn chain_step(&self, nu: f64, nu_next: f64, j: i64) -> Result<Inequality> {
        let lhs = self.step(nu, j)? - self.b(nu_next, j + 1)?;
        Ok(Inequality::geq(lhs, self.jump(j)))
    }

    fn nonincreasing(&self) -> Result<Certificate> {
        let budget = self.tracking_budget()?;
        let cert = self.base("Cor5.5", budget).param("nu", 0.5).param("anchors", "numerical");
        if !self.gamma.monotone().is_nonincreasing() {
            return Ok(cert.inapplicable("transition is not nonincreasing"));
        }
        let mut best_a: Option<(i64, Inequality)> = None;
        for j in self.j_lo..self.j_hi {
            let q = self.a_anchor(0.5, j)?;
            if best_a.map_or(true, |(_, b)| q.slack > b.slack) {
                best_a = Some((j, q));
            }
        }
        let (j0, qa) = best_a.expect("nonempty lattice range");
        let mut best_r: Option<(i64, Inequality)> = None;
        for j in j0 + 1..=self.j_hi {
            let q = self.r_anchor(0.5, j)?;
            if best_r.map_or(true, |(_, b)| q.slack > b.slack) {
                best_r = Some((j, q));
            }
        }
        let (j1, qr) = best_r.expect("nonempty lattice range");
        let mut cert = cert.param("j0", j0).param("n", j1 - j0);
        cert.inequalities = vec![qa, qr];
        Ok(cert.settle(CertVerdict::Tracking))
    }

    fn uniform_nu(&self, nu1: f64, nu2: f64) -> Result<Certificate> {
        let budget = self.tracking_budget()?;
        let cert = self.base("Cor5.6", budget).param("nu1", nu1).param("nu2", nu2).param("anchors", "numerical");
        let grid: Vec<f64> = (self.j_lo..self.j_hi).map(|j| self.t(j)).collect();
        let h_nu = match transfer_time(self.pair, nu1, nu2, &grid, self.h) {
            Ok(v) => v,
            Err(Error::Hypothesis(_)) => {
                return Ok(cert.inapplicable("h is below the transfer time h_{nu1,nu2}"))
            }
            Err(e) => return Err(e),
        };
        let cert = cert.param("h_nu", h_nu);
        let step = |j: i64| -> Result<Vec<Inequality>> {
            Ok(vec![Inequality::geq((nu2 - nu1) * self.sep(j + 1)?, self.jump(j))])
        };
        self.finish_chain(cert, nu1, nu1, budget, &step)
    }

    fn remark57(&self, nu: f64) -> Result<Certificate> {
        let budget = self.tracking_budget()?;
        let (nu1, nu2) = (nu, 1.0 - nu);
        let cert = self.base("Rmk5.7", budget).param("nu1", nu1).param("nu2", nu2).param("anchors", "numerical");
        let step = |j: i64| -> Result<Vec<Inequality>> {
            let transfer = Inequality::geq(self.step(nu1, j)?, self.b(nu2, j + 1)?);
            if transfer.slack <= budget {
                return Ok(vec![transfer]);
            }
            Ok(vec![transfer, Inequality::geq((nu2 - nu1) * self.sep(j + 1)?, self.jump(j))])
        };
        self.finish_chain(cert, nu1, nu1, budget, &step)
    }

    fn finish_chain(
        &self,
        cert: Certificate,
        nu_a: f64,
        nu_r: f64,
        budget: f64,
        step: &dyn Fn(i64) -> Result<Vec<Inequality>>,
    ) -> Result<Certificate> {
        match self.scan_chain(nu_a, nu_r, budget, step)? {
            Some((j0, j1, ineqs)) => {
                let mut cert = cert.param("j0", j0).param("n", j1 - j0);
                cert.inequalities = ineqs;
                Ok(cert.settle(CertVerdict::Tracking))
            }
            None => Ok(cert.inapplicable("no anchored chain in the search window")),
        }
    }

    fn two_point(&self) -> Result<Certificate> {
        let budget = self.tracking_budget()?;
        let cert = self
            .base("Cor5.8", budget)
            .param("j0", -1)
            .param("n", 2)
            .param("nu1", 0.25)
            .param("nu2", 0.75)
            .param("anchors", "numerical");
        if self.j_lo > -1 || self.j_hi < 1 {
            return Ok(cert.inapplicable("lattice points -h, 0, h not in the search window"));
        }
        let mut cert = cert;
        cert.inequalities = vec![
            self.a_anchor(0.25, -1)?,
            self.r_anchor(0.25, 1)?,
            Inequality::geq(0.5 * self.sep(0)?, self.jump(-1)),
            Inequality::geq(0.5 * self.sep(1)?, self.jump(0)),
            Inequality::geq(self.step(0.25, -1)?, self.b(0.75, 0)?),
            Inequality::geq(self.step(0.25, 0)?, self.b(0.75, 1)?),
        ];
        Ok(cert.settle(CertVerdict::Tracking))
    }

    fn chain_constant(&self, nu: f64) -> Result<Certificate> {
        let budget = self.tracking_budget()?;
        let cert = self.base("Thm5.4", budget).param("schedule", "constant").param("nu", nu).param("anchors", "numerical");
        let step = |j: i64| -> Result<Vec<Inequality>> { Ok(vec![self.chain_step(nu, nu, j)?]) };
        self.finish_chain(cert, nu, nu, budget, &step)
    }

    fn chain_ramp(&self, alpha: f64) -> Result<Certificate> {
        let budget = self.tracking_budget()?;
        let cert = self.base("Thm5.4", budget).param("schedule", "ramp").param("alpha", alpha).param("anchors", "numerical");
        if !(0.0 < alpha && alpha < 0.5) {
            return Err(Error::InvalidParameter(format!("alpha must lie in (0, 1/2), got {alpha}")));
        }
        let Some((m1, m2)) = self.entry_exit(0.5 + alpha, 0.5 - alpha, budget)? else {
            return Ok(cert.inapplicable("anchors not found"));
        };
        let nus: Vec<f64> =
            (m1..=m2).map(|j| 0.5 + (m2 + m1 - 2 * j) as f64 / (m2 - m1) as f64 * alpha).collect();
        self.chain_custom(cert, m1, &nus, budget)
    }

    fn chain_custom(&self, cert: Certificate, j0: i64, nus: &[f64], budget: f64) -> Result<Certificate> {
        let n = nus.len() as i64 - 1;
        if n < 1 || j0 < self.j_lo || j0 + n > self.j_hi + 1 {
            return Err(Error::InvalidParameter(format!("chain j0 = {j0}, n = {n} outside the lattice range")));
        }
        let mut cert = cert.param("j0", j0).param("n", n);
        cert.inequalities.push(self.a_anchor(nus[0], j0)?);
        for (k, w) in nus.windows(2).enumerate() {
            let q = self.chain_step(w[0], w[1], j0 + k as i64)?;
            cert.inequalities.push(q);
            if q.slack <= budget {
                break;
            }
        }
        cert.inequalities.push(self.r_anchor(nus[n as usize], j0 + n)?);
        Ok(cert.settle(CertVerdict::Tracking))
    }

    fn tipping_base(&self, criterion: &str) -> Result<Certificate> {
        if !self.gamma.monotone().is_nondecreasing() {
            return Err(Error::Hypothesis(format!("{criterion} needs a nondecreasing transition")));
        }
        Ok(self.base(criterion, self.pair.error_budget()))
    }

    fn one_step(&self) -> Result<Certificate> {
        let mut cert = self.tipping_base("Thm5.11-i")?;
        let mut best: Option<(i64, Inequality)> = None;
        for j in self.j_lo..self.j_hi {
            let q = Inequality::leq(self.sep(j + 1)?, self.jump(j));
            if best.map_or(true, |(_, b)| q.slack > b.slack) {
                best = Some((j, q));
            }
        }
        let (j0, q) = best.expect("nonempty lattice range");
        cert.set("j0", j0);
        cert.inequalities.push(q);
        Ok(cert.settle(CertVerdict::TippingNoBounded))
    }

    fn two_step_nu(&self, nus: &[f64]) -> Result<Certificate> {
        let cert = self.tipping_base("Thm5.11-ii")?;
        let budget = cert.error_budget;
        let mut best: Option<(i64, f64, Vec<Inequality>, f64)> = None;
        for j in self.j_lo..self.j_hi {
            for &nu in nus {
                let q1 = Inequality::leq((1.0 - nu) * self.sep(j + 1)?, self.jump(j));
                let mut qs = vec![q1];
                if q1.slack > budget {
                    let x = self.step(nu, j + 1)?;
                    qs.push(Inequality::leq(x - self.pair.r(self.t(j + 2))?, self.jump(j + 1)));
                }
                let m = qs.iter().map(|q| q.slack).fold(f64::INFINITY, f64::min);
                if best.as_ref().map_or(true, |b| m > b.3) {
                    best = Some((j, nu, qs, m));
                }
            }
        }
        let (j0, nu, qs, _) = best.expect("nonempty lattice range");
        let mut cert = cert.param("j0", j0).param("nu", nu);
        cert.inequalities = qs;
        Ok(cert.settle(CertVerdict::TippingNoBounded))
    }

    fn two_step_shift(&self) -> Result<Certificate> {
        let mut cert = self.tipping_base("Thm5.11-iii")?;
        let f = self.pair.field();
        let cfg = self.pair.integrator();
        let mut best: Option<(i64, Inequality)> = None;
        for j in self.j_lo..self.j_hi {
            let (t1, t2) = (self.t(j + 1), self.t(j + 2));
            let y = self.pair.a(t1)? - self.jump(j);
            let x = flow(f, t2, t1, y, cfg)?.extended();
            let q = Inequality::leq(x - self.pair.r(t2)?, self.jump(j + 1));
            if best.map_or(true, |(_, b)| q.slack > b.slack) {
                best = Some((j, q));
            }
        }
        let (j0, q) = best.expect("nonempty lattice range");
        cert.set("j0", j0);
        cert.inequalities.push(q);
        Ok(cert.settle(CertVerdict::TippingNoBounded))
    }

    fn several_steps(&self) -> Result<Certificate> {
        let mut cert = self.tipping_base("Thm5.11-iv")?;
        let g = self.pair.field().translate_by_transition(self.gamma);
        let cfg = self.pair.integrator();
        let j0 = self.j_lo;
        let t0 = self.t(j0);
        let tr = integrate_span(&g, t0, self.pair.a(t0)? + self.gam(j0), self.t(self.j_hi), cfg)?;
        cert.transition_solves += 1;
        let scale = tr.samples().iter().fold(1f64, |m, (_, x)| if x.is_finite() { m.max(x.abs()) } else { m });
        cert.error_budget += cfg.error_scale(scale);
        let mut best: Option<(i64, Inequality)> = None;
        for j in j0 + 1..=self.j_hi {
            let t = self.t(j);
            let x = match tr.value(t) {
                Some(x) => x,
                None => f64::NEG_INFINITY,
            };
            let q = Inequality::leq(x, self.pair.r(t)? + self.gam(j));
            if best.map_or(true, |(_, b)| q.slack > b.slack) {
                best = Some((j, q));
            }
            if x == f64::NEG_INFINITY {
                break;
            }
        }
        let (j1, q) = best.expect("nonempty lattice range");
        cert.set("j0", j0);
        cert.set("n", j1 - j0);
        if let Some(bu) = tr.blow_up() {
            cert.set("escape_bracket", json!([bu.bracket.0, bu.bracket.1]));
        }
        cert.inequalities.push(q);
        Ok(cert.settle(CertVerdict::TippingNoBounded))
    }

    fn tipping_chain(&self, j0: i64, nus: &[f64]) -> Result<Certificate> {
        let cert = self.tipping_base("Thm5.10")?;
        let n = nus.len() as i64 - 1;
        if n < 1 || nus[0] != 1.0 || nus[n as usize] != 0.0 {
            return Err(Error::InvalidParameter("tipping chain needs nu_{j0} = 1 and nu_{j0+n} = 0".into()));
        }
        if j0 < self.j_lo || j0 + n > self.j_hi + 1 {
            return Err(Error::InvalidParameter(format!("chain j0 = {j0}, n = {n} outside the lattice range")));
        }
        let mut cert = cert.param("j0", j0).param("n", n).param("nus", nus.to_vec());
        for (k, w) in nus.windows(2).enumerate() {
            let j = j0 + k as i64;
            let lhs = self.step(w[0], j)? - self.b(w[1], j + 1)?;
            cert.inequalities.push(Inequality::leq(lhs, self.jump(j)));
        }
        Ok(cert.settle(CertVerdict::TippingNoBounded))
    }
}

/// Tracking certificate for `x' = f(t, x - Gamma^h(t))`. Only the
/// unperturbed pair, unperturbed flows and the anchors are used.
pub fn check_piecewise_tracking(pw: &Piecewise<'_>, strategy: &TrackingStrategy) -> Result<Certificate> {
    match strategy {
        TrackingStrategy::Nonincreasing => pw.nonincreasing(),
        TrackingStrategy::UniformNu { nu1, nu2 } => {
            if !(0.0 < *nu1 && nu1 < nu2 && *nu2 < 1.0) {
                return Err(Error::InvalidParameter(format!("need 0 < nu1 < nu2 < 1, got ({nu1}, {nu2})")));
            }
            pw.uniform_nu(*nu1, *nu2)
        }
        TrackingStrategy::Remark57 { nus } => scan(nus, |nu| {
            if !(0.0 < nu && nu < 0.5) {
                return Err(Error::InvalidParameter(format!("nu must lie in (0, 1/2), got {nu}")));
            }
            pw.remark57(nu)
        }),
        TrackingStrategy::TwoPoint => pw.two_point(),
        TrackingStrategy::Chain(s) => match s {
            NuSchedule::Constant(nu) => pw.chain_constant(*nu),
            NuSchedule::ConstantScan(nus) => scan(nus, |nu| pw.chain_constant(nu)),
            NuSchedule::Ramp { alpha } => pw.chain_ramp(*alpha),
            NuSchedule::RampScan(alphas) => scan(alphas, |a| pw.chain_ramp(a)),
            NuSchedule::Custom { j0, nus } => {
                let budget = pw.tracking_budget()?;
                let cert = pw.base("Thm5.4", budget).param("schedule", "custom").param("nus", nus.clone());
                pw.chain_custom(cert, *j0, nus, budget)
            }
        },
    }
}

/// Tipping certificate for `x' = f(t, x - Gamma^h(t))` with `Gamma`
/// nondecreasing. Only the several-steps variant integrates the transition
/// equation.
pub fn check_piecewise_tipping(pw: &Piecewise<'_>, strategy: &TippingStrategy) -> Result<Certificate> {
    match strategy {
        TippingStrategy::OneStep => pw.one_step(),
        TippingStrategy::TwoStepNu { nus } => pw.two_step_nu(nus),
        TippingStrategy::TwoStepShift => pw.two_step_shift(),
        TippingStrategy::SeveralSteps => pw.several_steps(),
        TippingStrategy::Chain { j0, nus } => pw.tipping_chain(*j0, nus),
    }
}

fn scan(grid: &[f64], mut run: impl FnMut(f64) -> Result<Certificate>) -> Result<Certificate> {
    let mut out = Vec::new();
    for &v in grid {
        let c = run(v)?;
        let fired = c.fired();
        out.push(c);
        if fired {
            break;
        }
    }
    best_of(out).ok_or_else(|| Error::InvalidParameter("empty parameter grid".into()))
}
