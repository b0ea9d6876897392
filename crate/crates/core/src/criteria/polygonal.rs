//! Sharp criteria for the polygonal transitions `Gamma_{c,d}` and the
//! step limit `c = inf`.

use super::continuous::grid_modulus;
use super::{check_consistency, nu_grid, CertVerdict, Certificate, Inequality};
use crate::error::{Error, Result};
use crate::pullback::HyperbolicPair;

const GRID: usize = 4000;

struct Samples {
    t: Vec<f64>,
    s: Vec<f64>,
}

fn samples(pair: &HyperbolicPair, half: f64) -> Result<Samples> {
    let t: Vec<f64> = (0..=GRID).map(|i| -half + 2.0 * half * i as f64 / GRID as f64).collect();
    let s = t.iter().map(|&t| pair.separation(t)).collect::<Result<Vec<_>>>()?;
    Ok(Samples { t, s })
}

fn pointwise(
    name: &str,
    budget: f64,
    sm: &Samples,
    verdict: CertVerdict,
    ineq: impl Fn(f64, f64) -> Inequality,
) -> Certificate {
    let mut cert = Certificate::new(name, budget);
    cert.inequalities = sm.t.iter().zip(&sm.s).map(|(&t, &s)| ineq(t, s)).collect();
    cert.error_budget += grid_modulus(&cert.inequalities);
    cert.settle(verdict)
}

fn best_nu(mut certs: Vec<(f64, Certificate)>) -> Certificate {
    certs.sort_by(|a, b| b.1.margin.total_cmp(&a.1.margin));
    let (nu, c) = certs.swap_remove(0);
    c.param("nu", nu)
}

/// Every polygonal criterion at `(c, d)`; `c = inf` selects the step
/// transition `d Gamma_inf`.
pub fn polygonal_certificates(pair: &HyperbolicPair, c: f64, d: f64) -> Result<Vec<Certificate>> {
    if !(c > 0.0) || !(d >= 0.0) {
        return Err(Error::InvalidParameter(format!("need c > 0 and d >= 0, got ({c}, {d})")));
    }
    let e = 2.0 * pair.error_budget();
    if c.is_infinite() {
        let s = pair.separation(0.0)?;
        let tr = Certificate::new("step-limit", e).param("d", d).param("c", "inf");
        let mut tp = tr.clone();
        let mut tr = tr;
        tr.inequalities.push(Inequality::geq(s, 2.0 * d));
        tp.inequalities.push(Inequality::leq(s, 2.0 * d));
        let out = vec![tr.settle(CertVerdict::Tracking), tp.settle(CertVerdict::TippingNoBounded)];
        check_consistency(&out)?;
        return Ok(out);
    }
    let half = 1.0 / c;
    let sm = samples(pair, half)?;
    let smax = sm.s.iter().fold(0f64, |m, &s| m.max(s));
    let budget = e * (1.0 + smax / c);
    let k = |t: f64| (1.0 - c * c * t * t) / (2.0 * c);
    let mut out = Vec::new();

    out.push(pointwise("Thm6.12-i", budget, &sm, CertVerdict::Tracking, |_, s| {
        Inequality::geq(s * s / (2.0 * c), 2.0 * d)
    }));
    out.push(pointwise("Thm6.12-ii", budget, &sm, CertVerdict::Tracking, |t, s| {
        Inequality::geq(s + k(t) * s * s, 2.0 * d)
    }));
    let nus = nu_grid(0.0, 1.0, 21);
    out.push(best_nu(
        nus.iter()
            .map(|&nu| {
                let c3 = pointwise("Thm6.12-iii", budget, &sm, CertVerdict::Tracking, |_, s| {
                    Inequality::geq(nu * s + (1.0 - nu) / (2.0 * c) * s * s, 2.0 * d)
                });
                (nu, c3)
            })
            .collect(),
    ));

    // `Cor6.14-i`: `2d < ã - r̃` on `[-t_d, t_d]` with `t_d = 1/c`.
    let mut t_d_max = 0.0;
    let (w0, w1) = pair.window();
    let reach = (-w0).min(w1);
    let mut t = 0.0;
    while t <= reach {
        if pair.separation(t)?.min(pair.separation(-t)?) - 2.0 * d > budget {
            t_d_max = t;
        } else {
            break;
        }
        t += 0.01;
    }
    let c14 = pointwise("Cor6.14-i", budget, &sm, CertVerdict::Tracking, |_, s| Inequality::geq(s, 2.0 * d))
        .param("t_d", half)
        .param("t_d_max", t_d_max);
    let c14 = if t_d_max > 0.0 { c14.param("c_min", 1.0 / t_d_max) } else { c14 };
    out.push(c14);
    out.push(best_nu(
        nu_grid(0.0, 0.95, 20)
            .into_iter()
            .map(|nu| {
                let mu = (1.0 - nu) / (2.0 * c);
                let cert = pointwise("Cor6.14-ii", budget, &sm, CertVerdict::Tracking, |_, s| {
                    Inequality::geq(nu * s + mu * s * s, 2.0 * d)
                })
                .param("mu", mu)
                .param("t_d", half);
                (nu, cert)
            })
            .collect(),
    ));
    out.push(pointwise("Prop6.13", budget, &sm, CertVerdict::TippingNoBounded, |t, s| {
        Inequality::leq(s + k(t) * s * s, 2.0 * d)
    }));
    let mu = 1.0 / (2.0 * c);
    out.push(
        pointwise("Cor6.14-iii", budget, &sm, CertVerdict::TippingNoBounded, |_, s| {
            Inequality::leq(s + mu * s * s, 2.0 * d)
        })
        .param("mu", mu)
        .param("t_d", half),
    );
    for cert in out.iter_mut() {
        cert.set("c", c);
        cert.set("d", d);
    }
    check_consistency(&out)?;
    Ok(out)
}

/// Strongest firing polygonal certificate, or the closest miss.
pub fn check_polygonal(pair: &HyperbolicPair, c: f64, d: f64) -> Result<Certificate> {
    let all = polygonal_certificates(pair, c, d)?;
    let score = |x: &Certificate| x.margin - x.error_budget;
    let fired = all.iter().filter(|x| x.fired()).max_by(|a, b| score(a).total_cmp(&score(b)));
    if let Some(best) = fired {
        return Ok(best.clone());
    }
    Ok(all.into_iter().max_by(|a, b| score(a).total_cmp(&score(b))).expect("at least one criterion"))
}
