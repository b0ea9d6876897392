//! Size-induced tipping of the synchronized Hopfield neuron as alpha grows.

use tipping::bifurcation::{classify, flip_bracket, ClassifyConfig};
use tipping::fields::{hopfield_field, Transition};

fn main() -> tipping::Result<()> {
    let cfg = ClassifyConfig::default();
    let zero = Transition::zero();
    for alpha in [0.0, 0.01, 0.02, 0.03, 0.04, 0.1, 0.5] {
        let v = classify(&hopfield_field(alpha)?, &zero, None, &cfg)?;
        println!("alpha = {alpha:<5} {:<13} gap {:+.4}", v.case.label(), v.gap);
    }
    let grid: Vec<f64> = (0..=10).map(|i| 0.02 * i as f64).collect();
    let build = |alpha: f64| Ok((hopfield_field(alpha)?, Transition::zero()));
    for tol in [1e-3, 1e-4, 1e-5] {
        let b = flip_bracket(&grid, &build, tol, &cfg)?;
        println!("tol {tol:e}: tracks at {:.6}, tips at {:.6}", b.tracking, b.tipping);
    }
    Ok(())
}
