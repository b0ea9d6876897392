//! Rate-induced tipping of the energy balance model for a size between d2 and d1.

use tipping::bifurcation::{classify, flip_bracket, ClassifyConfig};
use tipping::fields::{climate_field, ClimateMode, ClimateParams, Transition};

fn main() -> tipping::Result<()> {
    let cfg = ClassifyConfig::default();
    let d = 0.9999;
    for l in [0.0, 20.0] {
        let field = |c: f64| climate_field(ClimateParams { mode: ClimateMode::Coupled, c, d, l });
        for c in [0.03, 0.05, 0.07, 0.1] {
            let v = classify(&field(c)?, &Transition::zero(), None, &cfg)?;
            println!("l = {l:>4}, c = {c:<4}: {:<13} gap {:+.3} K", v.case.label(), v.gap);
        }
        let grid: Vec<f64> = (0..=8).map(|i| 0.02 + 0.01 * i as f64).collect();
        let build = |c: f64| Ok((field(c)?, Transition::zero()));
        match flip_bracket(&grid, &build, 1e-6, &cfg) {
            Ok(b) => println!("l = {l:>4}: critical rate in [{:.6}, {:.6}]", b.tracking, b.tipping),
            Err(e) => println!("l = {l:>4}: {e}"),
        }
    }
    Ok(())
}
