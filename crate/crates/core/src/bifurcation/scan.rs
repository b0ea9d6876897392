//! Parallel parameter scans of `lambda*` and verdict flip brackets.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{classify, lambda_star, Case, ClassifyConfig, LambdaStar};
use crate::error::{Error, Result};
use crate::fields::{make_quadratic, ForcingProfile, ScalarField, Transition};

/// One scan point. `param` is `h`, `s` or `d` depending on the scan.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanRow {
    pub c: f64,
    pub param: f64,
    pub lambda: Option<LambdaStar>,
    pub verdict: String,
}

impl ScanRow {
    fn from_result(c: f64, param: f64, r: Result<LambdaStar>) -> Self {
        match r {
            Ok(l) => ScanRow { c, param, verdict: l.sign_label().to_string(), lambda: Some(l) },
            Err(e) => ScanRow { c, param, lambda: None, verdict: format!("failed: {e}") },
        }
    }

    pub fn value(&self) -> Option<f64> {
        self.lambda.map(|l| l.value)
    }
}

/// Seventeen significant digits.
pub fn format_number(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        format!("{x}")
    }
}

/// CSV with columns `c, <param>, lambda_star, bracket_lo, bracket_hi, verdict`.
pub fn to_csv(rows: &[ScanRow], param: &str) -> String {
    let mut out = format!("c,{param},lambda_star,bracket_lo,bracket_hi,verdict\n");
    for r in rows {
        let (v, lo, hi) = match r.lambda {
            Some(l) => (format_number(l.value), format_number(l.bracket.0), format_number(l.bracket.1)),
            None => (String::new(), String::new(), String::new()),
        };
        let verdict = r.verdict.replace([',', '\n'], ";");
        out.push_str(&format!("{},{},{v},{lo},{hi},{verdict}\n", format_number(r.c), format_number(r.param)));
    }
    out
}

fn sort_rows(rows: &mut [ScanRow]) {
    rows.sort_by(|a, b| a.c.total_cmp(&b.c).then(a.param.total_cmp(&b.param)));
}

/// `lambda*` for `x' = f(t, x - Gamma^h(c t))` over a `(c, h)` grid; `h = 0`
/// keeps the transition continuous. `cfg_for` gives the classification
/// settings per rate.
pub fn scan_rate_step(
    f: &ScalarField,
    gamma: &Transition,
    c_grid: &[f64],
    h_grid: &[f64],
    tol: f64,
    cfg_for: &(dyn Fn(f64) -> ClassifyConfig + Sync),
) -> Vec<ScanRow> {
    let pts: Vec<(f64, f64)> = c_grid.iter().flat_map(|&c| h_grid.iter().map(move |&h| (c, h))).collect();
    let mut rows: Vec<ScanRow> = pts
        .par_iter()
        .map(|&(c, h)| {
            let r = (|| {
                let g = gamma.rescale_time(c)?;
                let g = if h > 0.0 { g.discretize(h)? } else { g };
                lambda_star(f, &g, tol, &cfg_for(c))
            })();
            ScanRow::from_result(c, h, r)
        })
        .collect();
    sort_rows(&mut rows);
    rows
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhaseScan {
    pub rows: Vec<ScanRow>,
    /// Every computed `lambda*` is at most `-rho`.
    pub total_tracking: bool,
    /// Consecutive phases between which the sign of `lambda*` changes.
    pub sign_changes: Vec<(f64, f64)>,
}

/// `s -> lambda*(Gamma(c .), p_s)` at fixed rate.
pub fn scan_phase(
    p: &ForcingProfile,
    gamma: &Transition,
    c: f64,
    s_grid: &[f64],
    rho: f64,
    tol: f64,
    cfg: &ClassifyConfig,
) -> PhaseScan {
    let mut rows: Vec<ScanRow> = s_grid
        .par_iter()
        .map(|&s| {
            let r = (|| {
                let f = make_quadratic(&p.time_shift(s));
                lambda_star(&f, &gamma.rescale_time(c)?, tol, cfg)
            })();
            ScanRow::from_result(c, s, r)
        })
        .collect();
    sort_rows(&mut rows);
    let total_tracking = rows.iter().all(|r| r.lambda.is_some_and(|l| l.bracket.1 <= -rho));
    let sign_changes = rows
        .windows(2)
        .filter_map(|w| match (w[0].value(), w[1].value()) {
            (Some(a), Some(b)) if (a < 0.0) != (b < 0.0) => Some((w[0].param, w[1].param)),
            _ => None,
        })
        .collect();
    PhaseScan { rows, total_tracking, sign_changes }
}

/// `d -> lambda*` for the transition `d Gamma`.
pub fn scan_size(f: &ScalarField, gamma: &Transition, c: f64, d_grid: &[f64], tol: f64, cfg: &ClassifyConfig) -> Vec<ScanRow> {
    let mut rows: Vec<ScanRow> = d_grid
        .par_iter()
        .map(|&d| ScanRow::from_result(c, d, lambda_star(f, &gamma.scale(d), tol, cfg)))
        .collect();
    sort_rows(&mut rows);
    rows
}

/// `lambda*` over a one-parameter family of (field, transition) problems.
pub fn scan_family(
    grid: &[f64],
    build: &(dyn Fn(f64) -> Result<(ScalarField, Transition)> + Sync),
    tol: f64,
    cfg: &ClassifyConfig,
) -> Vec<ScanRow> {
    let mut rows: Vec<ScanRow> = grid
        .par_iter()
        .map(|&x| {
            let (f, g) = match build(x) {
                Ok(p) => p,
                Err(e) => return ScanRow::from_result(f64::NAN, x, Err(e)),
            };
            match lambda_star(&f, &g, tol, cfg) {
                // Shifted non-coercive fields can lose the seeded basin at the
                // bracket ends; the unshifted verdict is still meaningful.
                Err(Error::Bracket(_)) if !f.is_coercive() => match classify(&f, &g, None, cfg) {
                    Ok(v) => ScanRow { c: f64::NAN, param: x, lambda: None, verdict: v.case.label().to_string() },
                    Err(e) => ScanRow::from_result(f64::NAN, x, Err(e)),
                },
                r => ScanRow::from_result(f64::NAN, x, r),
            }
        })
        .collect();
    rows.sort_by(|a, b| a.param.total_cmp(&b.param));
    rows
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FlipBracket {
    /// Largest parameter known to track.
    pub tracking: f64,
    /// Smallest parameter known to tip.
    pub tipping: f64,
    pub tol: f64,
}

impl FlipBracket {
    pub fn width(&self) -> f64 {
        (self.tipping - self.tracking).abs()
    }
}

/// First A → C flip of `classify` along `grid`, refined by bisection to `tol`.
pub fn flip_bracket(
    grid: &[f64],
    build: &(dyn Fn(f64) -> Result<(ScalarField, Transition)> + Sync),
    tol: f64,
    cfg: &ClassifyConfig,
) -> Result<FlipBracket> {
    let case_at = |x: f64| -> Result<Case> {
        let (f, g) = build(x)?;
        Ok(classify(&f, &g, None, cfg)?.case)
    };
    let cases: Vec<Result<Case>> = grid.par_iter().map(|&x| case_at(x)).collect();
    let mut idx = None;
    for i in 1..grid.len() {
        if matches!(cases[i - 1], Ok(Case::Tracking)) && matches!(cases[i], Ok(Case::Tipping)) {
            idx = Some(i);
            break;
        }
    }
    let i = idx.ok_or_else(|| Error::Bracket("no tracking-to-tipping flip on the grid".into()))?;
    let (mut lo, mut hi) = (grid[i - 1], grid[i]);
    while (hi - lo).abs() > tol {
        let mid = 0.5 * (lo + hi);
        match case_at(mid)? {
            Case::Tracking => lo = mid,
            Case::Tipping => hi = mid,
            Case::BoundaryBand => break,
        }
    }
    Ok(FlipBracket { tracking: lo, tipping: hi, tol })
}
