//! Dense-output solution records.

use super::BlowUp;
use crate::error::{Error, Result};

/// Anything that can be evaluated as a function of time.
pub trait Curve: Sync {
    fn value_at(&self, t: f64) -> Result<f64>;
    fn derivative_at(&self, t: f64) -> Result<f64>;
}

/// One accepted step with its continuous extension.
#[derive(Clone, Debug)]
pub struct Segment {
    t0: f64,
    h: f64,
    lo: f64,
    hi: f64,
    r: [f64; 5],
}

impl Segment {
    pub(crate) fn new(t0: f64, h: f64, r: [f64; 5]) -> Self {
        let t1 = t0 + h;
        Segment { t0, h, lo: t0.min(t1), hi: t0.max(t1), r }
    }

    fn eval(&self, t: f64) -> f64 {
        let th = ((t - self.t0) / self.h).clamp(0.0, 1.0);
        let th1 = 1.0 - th;
        let r = &self.r;
        r[0] + th * (r[1] + th1 * (r[2] + th * (r[3] + th1 * r[4])))
    }

    fn deriv(&self, t: f64) -> f64 {
        let th = ((t - self.t0) / self.h).clamp(0.0, 1.0);
        let r = &self.r;
        let d = r[1]
            + (1.0 - 2.0 * th) * r[2]
            + (2.0 * th - 3.0 * th * th) * r[3]
            + (2.0 * th - 6.0 * th * th + 4.0 * th * th * th) * r[4];
        d / self.h
    }
}

#[derive(Clone, Debug)]
pub struct Trajectory {
    start: (f64, f64),
    end: (f64, f64),
    /// Sorted by `lo`.
    segments: Vec<Segment>,
    blow_up: Option<BlowUp>,
}

impl Trajectory {
    pub(crate) fn from_segments(s: f64, x0: f64, t: f64, y: f64, mut segments: Vec<Segment>, blow_up: Option<BlowUp>) -> Self {
        if t < s {
            segments.reverse();
        }
        Trajectory { start: (s, x0), end: (t, y), segments, blow_up }
    }

    pub fn start(&self) -> (f64, f64) {
        self.start
    }

    /// Last time reached and the state there.
    pub fn end(&self) -> (f64, f64) {
        self.end
    }

    pub fn blow_up(&self) -> Option<&BlowUp> {
        self.blow_up.as_ref()
    }

    /// Closed time interval covered by the dense output.
    pub fn span(&self) -> (f64, f64) {
        (self.start.0.min(self.end.0), self.start.0.max(self.end.0))
    }

    /// Times within a few ulps of the span count as covered, so grids built
    /// as `a + (b - a) i / n` may end marginally past `b`.
    pub fn covers(&self, t: f64) -> bool {
        let (a, b) = self.span();
        let eps = 8.0 * f64::EPSILON * a.abs().max(b.abs()).max(1.0);
        t >= a - eps && t <= b + eps
    }

    fn segment(&self, t: f64) -> Option<&Segment> {
        if !self.covers(t) {
            return None;
        }
        if self.segments.is_empty() {
            return None;
        }
        let i = self.segments.partition_point(|s| s.hi < t);
        self.segments.get(i.min(self.segments.len() - 1))
    }

    pub fn value(&self, t: f64) -> Option<f64> {
        if self.segments.is_empty() && t == self.start.0 {
            return Some(self.start.1);
        }
        self.segment(t).map(|s| s.eval(t))
    }

    pub fn derivative(&self, t: f64) -> Option<f64> {
        self.segment(t).map(|s| s.deriv(t))
    }

    /// Step end points in increasing order.
    pub fn sample_times(&self) -> Vec<f64> {
        let mut v: Vec<f64> = Vec::with_capacity(self.segments.len() + 1);
        if let Some(s) = self.segments.first() {
            v.push(s.lo);
        }
        v.extend(self.segments.iter().map(|s| s.hi));
        v
    }

    pub fn samples(&self) -> Vec<(f64, f64)> {
        self.sample_times().into_iter().map(|t| (t, self.value(t).unwrap_or(f64::NAN))).collect()
    }

    pub fn len(&self) -> usize {
        self.segments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.segments.is_empty()
    }
}

impl Curve for Trajectory {
    fn value_at(&self, t: f64) -> Result<f64> {
        let (lo, hi) = self.span();
        self.value(t).ok_or(Error::OutOfSpan { t, lo, hi })
    }

    fn derivative_at(&self, t: f64) -> Result<f64> {
        let (lo, hi) = self.span();
        self.derivative(t).ok_or(Error::OutOfSpan { t, lo, hi })
    }
}

/// Constant curve, for lower/upper solution tests.
#[derive(Clone, Copy, Debug)]
pub struct Constant(pub f64);

impl Curve for Constant {
    fn value_at(&self, _t: f64) -> Result<f64> {
        Ok(self.0)
    }

    fn derivative_at(&self, _t: f64) -> Result<f64> {
        Ok(0.0)
    }
}
