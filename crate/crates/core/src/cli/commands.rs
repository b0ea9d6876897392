//! The subcommands. Each returns a report; writing it out is left to the
//! caller.

use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use super::config::{as_config, set_param, Family, Grid, RunConfig, ScanKind};
use crate::bifurcation::{
    classify, flip_bracket, format_number, lambda_star, scan_family, scan_phase, scan_rate_step, scan_size, to_csv,
    ClassifyConfig, LambdaStar, ScanRow,
};
use crate::criteria::{
    bundle_verdict, certify_continuous, certify_piecewise, certify_polygonal, search_half_width, CertVerdict,
    Certificate, Instance,
};
use crate::error::{Error, Result};
use crate::fields::{build_model, model_ids, ForcingProfile, ModelSpec, Problem, ScalarField, Transition};
use crate::pullback::attractor_repeller;

/// Output of one command.
#[derive(Clone, Debug, Default)]
pub struct Report {
    /// Printed on standard output when no output directory is given.
    pub stdout: String,
    /// `(file name, contents)` written to the output directory.
    pub files: Vec<(String, String)>,
    /// Set when the run finished but its results disagree with each other.
    pub failure: Option<String>,
}

fn pretty<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

fn rate(spec: &ModelSpec) -> f64 {
    spec.c.unwrap_or(1.0)
}

/// Classification settings for a transition `Gamma(c t)`: the span grows
/// like `80/c` for slow transitions.
pub fn classify_config_for(base: &ClassifyConfig, c: f64) -> ClassifyConfig {
    let mut cfg = *base;
    if c.is_finite() && c > 0.0 && base.span.is_none() {
        cfg.half_span = cfg.half_span.max(80.0 / c);
    }
    cfg
}

pub fn models() -> Report {
    let ids = model_ids();
    let stdout = ids.iter().map(|(id, d)| format!("{id}\t{d}\n")).collect();
    let list: Vec<Value> = ids.iter().map(|(id, d)| json!({"id": id, "description": d})).collect();
    Report { stdout, files: vec![("models.json".into(), pretty(&list))], failure: None }
}

pub fn classify_cmd(cfg: &RunConfig) -> Result<Report> {
    let pr = build_model(&cfg.model).map_err(as_config)?;
    let v = classify(&pr.field, &pr.transition, None, &classify_config_for(&cfg.classify, rate(&cfg.model)))?;
    let out = pretty(&json!({"model": cfg.model, "verdict": v}));
    Ok(Report { stdout: out.clone(), files: vec![("classify.json".into(), out)], failure: None })
}

fn lambda_of(cfg: &RunConfig, spec: &ModelSpec, pr: &Problem) -> Result<LambdaStar> {
    lambda_star(&pr.field, &pr.transition, cfg.tol, &classify_config_for(&cfg.classify, rate(spec)))
}

pub fn lambda_star_cmd(cfg: &RunConfig) -> Result<Report> {
    let pr = build_model(&cfg.model).map_err(as_config)?;
    let l = lambda_of(cfg, &cfg.model, &pr)?;
    let out = pretty(&json!({"model": cfg.model, "lambda_star": l, "sign": l.sign_label()}));
    let csv = format!(
        "lambda_star,bracket_lo,bracket_hi,tol,iterations\n{},{},{},{},{}\n",
        format_number(l.value),
        format_number(l.bracket.0),
        format_number(l.bracket.1),
        format_number(l.tol),
        l.iterations
    );
    Ok(Report {
        stdout: out.clone(),
        files: vec![("lambda_star.json".into(), out), ("lambda_star.csv".into(), csv)],
        failure: None,
    })
}

fn grid_or(g: &Option<Grid>, default: Grid) -> Vec<f64> {
    g.clone().unwrap_or(default).values()
}

fn forcing_of(spec: &ModelSpec) -> Result<ForcingProfile> {
    let p0 = match spec.id.as_str() {
        "quadratic:bench53" => spec.p0.unwrap_or(0.962),
        "quadratic:phase" => spec.p0.unwrap_or(0.83),
        other => return Err(Error::Config(format!("phase scans need a quasi-periodic quadratic model, got '{other}'"))),
    };
    Ok(ForcingProfile::quasi_periodic(p0))
}

/// Field and transition of `spec` with some fields replaced.
fn model_with(spec: &ModelSpec, c: Option<f64>, d: Option<f64>, h: Option<f64>, s: Option<f64>) -> Result<Problem> {
    let mut m = spec.clone();
    if c.is_some() {
        m.c = c;
    }
    if d.is_some() {
        m.d = d;
    }
    m.h = h;
    if s.is_some() {
        m.s = s;
    }
    build_model(&m).map_err(as_config)
}

fn plot_blocks(rows: &[ScanRow]) -> String {
    let mut out = String::from("# c param lambda_star\n");
    let mut last: Option<f64> = None;
    for r in rows {
        if last.is_some_and(|c| c != r.c) {
            out.push('\n');
        }
        last = Some(r.c);
        let v = r.value().map(format_number).unwrap_or_else(|| "nan".into());
        out.push_str(&format!("{} {} {v}\n", format_number(r.c), format_number(r.param)));
    }
    out
}

pub fn scan_cmd(cfg: &RunConfig) -> Result<Report> {
    let sc = &cfg.scan;
    let spec = &cfg.model;
    let c = rate(spec);
    let ccfg = classify_config_for(&cfg.classify, c);
    let mut summary = json!({"kind": sc.kind, "model": spec});
    let (rows, param) = match sc.kind {
        ScanKind::RateStep => {
            let pr = model_with(spec, Some(1.0), None, None, None)?;
            let cs = grid_or(&sc.c_grid, Grid::linspace(0.1, 6.0, 10));
            let hs = grid_or(&sc.grid, Grid::linspace(0.1, 6.0, 10));
            let base = cfg.classify;
            let rows = scan_rate_step(&pr.field, &pr.transition, &cs, &hs, cfg.tol, &|c| classify_config_for(&base, c));
            (rows, "h".to_string())
        }
        ScanKind::Phase => {
            let p = forcing_of(spec)?;
            let pr = model_with(spec, Some(1.0), None, None, Some(0.0))?;
            let g = pr.transition;
            let ss = grid_or(&sc.grid, Grid::linspace(-15.0, 15.0, 31));
            let ps = scan_phase(&p.time_shift(spec.s.unwrap_or(0.0)), &g, c, &ss, sc.rho, cfg.tol, &ccfg);
            summary["total_tracking"] = json!(ps.total_tracking);
            summary["rho"] = json!(sc.rho);
            summary["sign_changes"] = json!(ps.sign_changes);
            (ps.rows, "s".to_string())
        }
        ScanKind::Size => {
            let pr = model_with(spec, None, Some(1.0), spec.h, None)?;
            let ds = grid_or(&sc.grid, Grid::linspace(0.0, 3.0, 16));
            (scan_size(&pr.field, &pr.transition, c, &ds, cfg.tol, &ccfg), "d".to_string())
        }
        ScanKind::Param => {
            let name = sc.param.clone().expect("validated");
            let xs = grid_or(&sc.grid, Grid::linspace(0.0, 1.0, 11));
            let spec = spec.clone();
            let build = move |x: f64| -> Result<(ScalarField, Transition)> {
                let mut m = spec.clone();
                set_param(&mut m, &name, x)?;
                let pr = build_model(&m)?;
                Ok((pr.field, pr.transition))
            };
            let rows = scan_family(&xs, &build, cfg.tol, &ccfg);
            if sc.flip {
                summary["flip"] = match flip_bracket(&xs, &build, cfg.tol, &ccfg) {
                    Ok(b) => json!(b),
                    Err(e) => json!({"error": e.to_string()}),
                };
            }
            summary["param"] = json!(sc.param);
            (rows, sc.param.clone().expect("validated"))
        }
    };
    let failed = rows.iter().filter(|r| r.verdict.starts_with("failed")).count();
    summary["points"] = json!(rows.len());
    summary["failed"] = json!(failed);
    let csv = to_csv(&rows, &param);
    let mut files = vec![("scan.csv".to_string(), csv.clone()), ("scan_summary.json".to_string(), pretty(&summary))];
    if cfg.emit_plot_data {
        files.push(("plot_scan.dat".into(), plot_blocks(&rows)));
    }
    Ok(Report { stdout: csv, files, failure: None })
}

fn transition_kind(spec: &ModelSpec) -> String {
    spec.transition.clone().unwrap_or_else(|| {
        match spec.id.as_str() {
            "polygonal" => "polygonal",
            "quadratic:bench53" | "quadratic:phase" => "arctan",
            _ => "zero",
        }
        .to_string()
    })
}

fn is_quadratic(spec: &ModelSpec) -> bool {
    matches!(spec.id.as_str(), "quadratic:bench53" | "quadratic:phase" | "polygonal")
}

fn resolve_family(cfg: &RunConfig, spec: &ModelSpec, pr: &Problem) -> Result<Family> {
    let kind = transition_kind(spec);
    let stepped = pr.transition.step_size().is_some();
    let family = match cfg.certify.family {
        Family::Auto if stepped => Family::Piecewise,
        Family::Auto if kind == "polygonal" || kind == "step" => Family::Polygonal,
        Family::Auto => Family::Continuous,
        f => f,
    };
    if pr.transition.is_identically_zero() {
        return Err(Error::Config("the model has no transition to certify".into()));
    }
    match family {
        Family::Piecewise if !stepped => Err(Error::Config("piecewise criteria need a step size h > 0".into())),
        Family::Continuous | Family::Polygonal if !is_quadratic(spec) => {
            Err(Error::Config(format!("{family:?} criteria cover the quadratic models only")))
        }
        Family::Continuous if stepped || !pr.transition.has_derivative() => {
            Err(Error::Config("continuous criteria need a differentiable transition with h = 0".into()))
        }
        Family::Polygonal if stepped || !(kind == "polygonal" || kind == "step") => {
            Err(Error::Config("polygonal criteria need a polygonal or step transition with h = 0".into()))
        }
        f => Ok(f),
    }
}

/// Whether a verdict agrees with the `lambda*` bracket: `None` when no
/// certificate fired or the bracket straddles zero.
pub fn agreement(verdict: CertVerdict, l: &LambdaStar) -> Option<bool> {
    let sign = match l.sign_label() {
        "tracking" => CertVerdict::Tracking,
        "tipping" => CertVerdict::TippingNoBounded,
        _ => return None,
    };
    match verdict {
        CertVerdict::NotApplicable => None,
        v => Some(v.is_tipping() == sign.is_tipping()),
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Bundle {
    pub model: ModelSpec,
    pub family: Family,
    pub verdict: CertVerdict,
    pub certificates: Vec<Certificate>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda_star: Option<LambdaStar>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda_sign: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub agrees: Option<Option<bool>>,
}

impl Bundle {
    fn fired(&self) -> Option<&Certificate> {
        self.certificates.iter().find(|c| c.fired())
    }
}

/// Runs the certificate ladder for one model.
pub fn certify_one(cfg: &RunConfig, spec: &ModelSpec) -> Result<Bundle> {
    let pr = build_model(spec).map_err(as_config)?;
    let family = resolve_family(cfg, spec, &pr)?;
    let c = rate(spec);
    let kind = transition_kind(spec);
    let certs = match family {
        Family::Piecewise => {
            let h = pr.transition.step_size().expect("checked");
            let w = search_half_width(c);
            let search = cfg.certify.search.unwrap_or((-w, w));
            let inst = Instance::prepare(&pr.field, &pr.transition, search, cfg.certify.pad.unwrap_or(2.0 * h + 40.0), &cfg.pair)?;
            certify_piecewise(&inst)?
        }
        Family::Continuous => {
            let w = search_half_width(c);
            let search = cfg.certify.search.unwrap_or((-w, w));
            let inst = Instance::prepare(&pr.field, &pr.transition, search, cfg.certify.pad.unwrap_or(40.0), &cfg.pair)?;
            let l0 = lambda_star(&pr.field, &Transition::zero(), cfg.tol, &cfg.classify)?;
            certify_continuous(&inst, Some(&l0))?
        }
        Family::Polygonal => {
            let c = if kind == "step" { f64::INFINITY } else { c };
            let w = if c.is_finite() { (1.0 / c).max(30.0) } else { 30.0 };
            let (a, b) = cfg.certify.search.unwrap_or((-w, w));
            let pad = cfg.certify.pad.unwrap_or(40.0);
            let pair = attractor_repeller(&pr.field, (a - pad, b + pad), &cfg.pair)?;
            certify_polygonal(&pair, c, spec.d.unwrap_or(1.0))?
        }
        Family::Auto => unreachable!("resolved"),
    };
    let mut bundle = Bundle {
        model: spec.clone(),
        family,
        verdict: bundle_verdict(&certs),
        certificates: certs,
        lambda_star: None,
        lambda_sign: None,
        agrees: None,
    };
    if cfg.cross_check {
        let l = lambda_of(cfg, spec, &pr)?;
        bundle.agrees = Some(agreement(bundle.verdict, &l));
        bundle.lambda_sign = Some(l.sign_label().into());
        bundle.lambda_star = Some(l);
    }
    Ok(bundle)
}

fn disagreement(b: &Bundle) -> Option<String> {
    match (b.agrees, b.fired()) {
        (Some(Some(false)), Some(c)) => Some(format!(
            "{} certificate ({}) contradicts lambda* = {:e} at {:?}",
            c.verdict.label(),
            c.criterion,
            b.lambda_star.map(|l| l.value).unwrap_or(f64::NAN),
            b.model
        )),
        _ => None,
    }
}

pub fn certify_cmd(cfg: &RunConfig) -> Result<Report> {
    match (&cfg.certify.c_grid, &cfg.certify.grid) {
        (Some(cg), Some(g)) => certify_grid(cfg, &cg.values(), &g.values()),
        _ => {
            let b = certify_one(cfg, &cfg.model)?;
            let out = pretty(&b);
            Ok(Report { stdout: out.clone(), files: vec![("certify.json".into(), out)], failure: disagreement(&b) })
        }
    }
}

fn verdict_code(v: CertVerdict) -> i32 {
    match v {
        CertVerdict::Tracking => 1,
        CertVerdict::TippingNoPair | CertVerdict::TippingNoBounded => -1,
        CertVerdict::NotApplicable => 0,
    }
}

fn certify_grid(cfg: &RunConfig, cs: &[f64], vs: &[f64]) -> Result<Report> {
    let param = cfg.certify.param.clone().unwrap_or_else(|| "h".into());
    let mut pts = Vec::new();
    for &c in cs {
        for &v in vs {
            let mut m = cfg.model.clone();
            m.c = Some(c);
            set_param(&mut m, &param, v)?;
            pts.push((c, v, m));
        }
    }
    let results: Vec<(f64, f64, Result<Bundle>)> =
        pts.into_par_iter().map(|(c, v, m)| (c, v, certify_one(cfg, &m))).collect();
    if let Some((_, _, Err(e))) = results.iter().find(|r| matches!(&r.2, Err(Error::Config(_)))) {
        return Err(e.clone());
    }
    let mut csv = format!("c,{param},verdict,criterion,margin,error_budget");
    if cfg.cross_check {
        csv.push_str(",lambda_star,lambda_sign,agrees");
    }
    csv.push('\n');
    let mut plot = format!("# c {param} verdict_code\n");
    let mut bundles = Vec::new();
    let mut failures = Vec::new();
    let mut last_c = None;
    for (c, v, r) in &results {
        if last_c.is_some_and(|x| x != *c) {
            plot.push('\n');
        }
        last_c = Some(*c);
        let head = format!("{},{}", format_number(*c), format_number(*v));
        match r {
            Ok(b) => {
                let (crit, margin, budget) = match b.fired() {
                    Some(x) => (x.criterion.clone(), format_number(x.margin), format_number(x.error_budget)),
                    None => (String::new(), String::new(), String::new()),
                };
                csv.push_str(&format!("{head},{},{crit},{margin},{budget}", b.verdict.label()));
                if let Some(l) = b.lambda_star {
                    let agrees = match b.agrees.flatten() {
                        Some(a) => a.to_string(),
                        None => String::new(),
                    };
                    csv.push_str(&format!(",{},{},{agrees}", format_number(l.value), l.sign_label()));
                }
                plot.push_str(&format!("{} {} {}\n", format_number(*c), format_number(*v), verdict_code(b.verdict)));
                if let Some(d) = disagreement(b) {
                    failures.push(d);
                }
                bundles.push(serde_json::to_value(b).expect("serializable"));
            }
            Err(e) => {
                let msg = e.to_string().replace([',', '\n'], ";");
                csv.push_str(&format!("{head},failed: {msg},,,"));
                if cfg.cross_check {
                    csv.push_str(",,,");
                }
                plot.push_str(&format!("{} {} nan\n", format_number(*c), format_number(*v)));
                bundles.push(json!({"c": c, param.as_str(): v, "error": e.to_string()}));
            }
        }
        csv.push('\n');
    }
    let mut files = vec![("certify.csv".to_string(), csv.clone()), ("certify.json".to_string(), pretty(&bundles))];
    if cfg.emit_plot_data {
        files.push(("plot_certify.dat".into(), plot));
    }
    let failure = (!failures.is_empty()).then(|| failures.join("\n"));
    Ok(Report { stdout: csv, files, failure })
}
