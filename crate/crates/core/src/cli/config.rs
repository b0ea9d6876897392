//! Run configuration: one JSON document, validated before any computation.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::bifurcation::ClassifyConfig;
use crate::error::{Error, Result};
use crate::fields::{build_model, ModelSpec};
use crate::pullback::PairConfig;

/// Explicit values or `{"start", "stop", "num"}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Grid {
    Values(Vec<f64>),
    Linspace(Linspace),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Linspace {
    pub start: f64,
    pub stop: f64,
    pub num: usize,
}

impl Grid {
    pub fn linspace(start: f64, stop: f64, num: usize) -> Self {
        Grid::Linspace(Linspace { start, stop, num })
    }

    pub fn values(&self) -> Vec<f64> {
        match self {
            Grid::Values(v) => v.clone(),
            Grid::Linspace(l) if l.num == 1 => vec![l.start],
            Grid::Linspace(l) => {
                (0..l.num).map(|i| l.start + (l.stop - l.start) * i as f64 / (l.num - 1) as f64).collect()
            }
        }
    }

    fn validate(&self, what: &str) -> Result<()> {
        let v = self.values();
        if v.is_empty() {
            return Err(Error::Config(format!("{what} grid is empty")));
        }
        if v.iter().any(|x| !x.is_finite()) {
            return Err(Error::Config(format!("{what} grid has non-finite values")));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScanKind {
    /// `lambda*` over `(c, h)`; `h = 0` keeps the transition continuous.
    #[default]
    RateStep,
    /// `lambda*` over forcing phases `s` at fixed `c`.
    Phase,
    /// `lambda*` over sizes `d` of the transition at fixed `c`.
    Size,
    /// `lambda*` over one named model parameter.
    Param,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScanConfig {
    pub kind: ScanKind,
    /// Rates for `rate-step`.
    pub c_grid: Option<Grid>,
    /// `h`, `s`, `d` or parameter values, depending on the kind.
    pub grid: Option<Grid>,
    /// Model field scanned by `param`: `c`, `d`, `h`, `s`, `l`, `alpha` or `p0`.
    pub param: Option<String>,
    /// Threshold of the total tracking flag of phase scans.
    pub rho: f64,
    /// Refine the first tracking-to-tipping flip of a `param` scan.
    pub flip: bool,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    /// Piecewise for discretized transitions, polygonal for polygonal and
    /// step transitions, continuous otherwise.
    #[default]
    Auto,
    Piecewise,
    Continuous,
    Polygonal,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CertifyConfig {
    pub family: Family,
    /// Search window of the criteria; `±max(80/c, 30)` when absent.
    pub search: Option<(f64, f64)>,
    /// Extra length of the pair window on each side of the search window.
    pub pad: Option<f64>,
    /// Grid mode: certify every `(c, value)` point.
    pub c_grid: Option<Grid>,
    pub grid: Option<Grid>,
    /// Model field varied along `grid`; `h` by default.
    pub param: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub model: ModelSpec,
    pub tol: f64,
    pub workers: Option<usize>,
    pub out: Option<PathBuf>,
    pub emit_plot_data: bool,
    pub cross_check: bool,
    pub classify: ClassifyConfig,
    pub pair: PairConfig,
    pub scan: ScanConfig,
    pub certify: CertifyConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            model: ModelSpec::new("quadratic:bench53"),
            tol: 1e-4,
            workers: None,
            out: None,
            emit_plot_data: false,
            cross_check: false,
            classify: ClassifyConfig::default(),
            pair: PairConfig::default(),
            scan: ScanConfig::default(),
            certify: CertifyConfig::default(),
        }
    }
}

pub const PARAMS: [&str; 7] = ["c", "d", "h", "s", "l", "alpha", "p0"];

/// Writes `value` into the model field `name`.
pub fn set_param(spec: &mut ModelSpec, name: &str, value: f64) -> Result<()> {
    let slot = match name {
        "c" => &mut spec.c,
        "d" => &mut spec.d,
        "h" => &mut spec.h,
        "s" => &mut spec.s,
        "l" => &mut spec.l,
        "alpha" => &mut spec.alpha,
        "p0" => &mut spec.p0,
        other => return Err(Error::Config(format!("unknown model parameter '{other}'"))),
    };
    *slot = Some(value);
    Ok(())
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(Error::Config(format!("tol must be positive, got {}", self.tol)));
        }
        if self.workers == Some(0) {
            return Err(Error::Config("workers must be at least 1".into()));
        }
        if self.emit_plot_data && self.out.is_none() {
            return Err(Error::Config("--emit-plot-data needs an output directory".into()));
        }
        build_model(&self.model).map_err(as_config)?;
        for g in [&self.scan.c_grid, &self.scan.grid, &self.certify.c_grid, &self.certify.grid].into_iter().flatten() {
            g.validate("scan")?;
        }
        for p in [&self.scan.param, &self.certify.param].into_iter().flatten() {
            if !PARAMS.contains(&p.as_str()) {
                return Err(Error::Config(format!("unknown model parameter '{p}'")));
            }
        }
        if self.scan.kind == ScanKind::Param && self.scan.param.is_none() {
            return Err(Error::Config("param scans need scan.param".into()));
        }
        if let Some((a, b)) = self.certify.search {
            if !(a < b) {
                return Err(Error::Config(format!("empty search window [{a}, {b}]")));
            }
        }
        if self.certify.c_grid.is_some() != self.certify.grid.is_some() {
            return Err(Error::Config("certify grid mode needs both c_grid and grid".into()));
        }
        Ok(())
    }
}

/// Parameter errors found while validating are configuration errors.
pub fn as_config(e: Error) -> Error {
    match e {
        Error::InvalidParameter(m) => Error::Config(m),
        e => e,
    }
}
