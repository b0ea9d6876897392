//! Breakpoints in time where a field may jump or lose smoothness.
//!
//! A knot set is a finite list of points plus any number of arithmetic
//! lattices `offset + k * spacing`, so piecewise-constant transitions with
//! infinitely many jumps can be represented exactly.

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Knots {
    points: Vec<f64>,
    lattices: Vec<(f64, f64)>,
}

fn slack(t: f64) -> f64 {
    1e-12 * (1.0 + t.abs())
}

impl Knots {
    pub fn none() -> Self {
        Self::default()
    }

    pub fn points(mut pts: Vec<f64>) -> Self {
        pts.retain(|p| p.is_finite());
        pts.sort_by(|a, b| a.total_cmp(b));
        pts.dedup();
        Knots { points: pts, lattices: Vec::new() }
    }

    /// Lattice `k * spacing`, `k` ranging over all integers.
    pub fn lattice(spacing: f64) -> Self {
        Knots { points: Vec::new(), lattices: vec![(spacing, 0.0)] }
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty() && self.lattices.is_empty()
    }

    pub fn union(&self, other: &Knots) -> Knots {
        let mut pts = self.points.clone();
        pts.extend_from_slice(&other.points);
        let mut out = Knots::points(pts);
        out.lattices = self.lattices.clone();
        for l in &other.lattices {
            if !out.lattices.contains(l) {
                out.lattices.push(*l);
            }
        }
        out
    }

    /// Knots of `t -> g(c t)` when `self` are the knots of `g`.
    pub fn rescale(&self, c: f64) -> Knots {
        let mut out = Knots::points(self.points.iter().map(|p| p / c).collect());
        out.lattices = self.lattices.iter().map(|&(h, o)| ((h / c).abs(), o / c)).collect();
        out
    }

    /// Knots of `t -> g(t + s)`.
    pub fn shift(&self, s: f64) -> Knots {
        let mut out = Knots::points(self.points.iter().map(|p| p - s).collect());
        out.lattices = self.lattices.iter().map(|&(h, o)| (h, o - s)).collect();
        out
    }

    /// First knot strictly beyond `t` in the direction `dir` (sign only).
    pub fn next_after(&self, t: f64, dir: f64) -> Option<f64> {
        let eps = slack(t);
        let mut best: Option<f64> = None;
        let mut take = |k: f64| {
            best = Some(match best {
                None => k,
                Some(b) if dir > 0.0 => b.min(k),
                Some(b) => b.max(k),
            });
        };
        if dir > 0.0 {
            let i = self.points.partition_point(|&p| p <= t + eps);
            if i < self.points.len() {
                take(self.points[i]);
            }
        } else {
            let i = self.points.partition_point(|&p| p < t - eps);
            if i > 0 {
                take(self.points[i - 1]);
            }
        }
        for &(h, o) in &self.lattices {
            let mut k = ((t - o) / h).floor();
            if dir > 0.0 {
                while o + k * h <= t + eps {
                    k += 1.0;
                }
            } else {
                k += 1.0;
                while o + k * h >= t - eps {
                    k -= 1.0;
                }
            }
            take(o + k * h);
        }
        best
    }

    /// All knots in the closed interval `[a, b]`, sorted.
    pub fn in_interval(&self, a: f64, b: f64) -> Vec<f64> {
        let mut out = Vec::new();
        let mut t = a - slack(a) * 2.0;
        while let Some(k) = self.next_after(t, 1.0) {
            if k > b {
                break;
            }
            out.push(k);
            t = k;
        }
        out
    }

    pub fn contains(&self, t: f64) -> bool {
        let eps = slack(t);
        self.next_after(t - 2.0 * eps, 1.0).is_some_and(|k| (k - t).abs() <= eps)
    }
}

/// Lattice index `j` with `j * h <= t < (j + 1) * h`, consistent with the
/// knot positions produced by [`Knots::lattice`].
pub fn lattice_index(t: f64, h: f64) -> f64 {
    let mut j = (t / h).floor();
    if (j + 1.0) * h <= t {
        j += 1.0;
    } else if j * h > t {
        j -= 1.0;
    }
    j
}
