//! Attractor-repeller pair of x' = -x^2 + p(t) and its hyperbolicity data.

use tipping::fields::{make_quadratic, ForcingProfile};
use tipping::pullback::{attractor_repeller, dichotomy_estimate, transfer_time, PairConfig};

fn main() -> tipping::Result<()> {
    let f = make_quadratic(&ForcingProfile::bench());
    let pair = attractor_repeller(&f, (-60.0, 60.0), &PairConfig::default())?;
    println!("min separation a - r = {:.6}", pair.min_separation());
    println!("tail error = {:.2e}", pair.tail_error());
    for t in [-20.0, -5.0, 0.0, 5.0, 20.0] {
        println!("t = {t:6.1}  a = {:9.6}  r = {:9.6}", pair.a(t)?, pair.r(t)?);
    }
    let grid: Vec<f64> = (0..=400).map(|i| -40.0 + 0.2 * i as f64).collect();
    let da = dichotomy_estimate(&f, pair.attractor(), &grid, 10.0)?;
    let dr = dichotomy_estimate(&f, pair.repeller(), &grid, 10.0)?;
    println!("attractor: k = {:.3}, beta = {:.3}", da.k, da.beta);
    println!("repeller:  k = {:.3}, beta = {:.3}", dr.k, dr.beta);
    let s: Vec<f64> = (0..80).map(|i| -40.0 + i as f64).collect();
    println!("h_(1/4,3/4) = {:.4}", transfer_time(&pair, 0.25, 0.75, &s, 20.0)?);
    Ok(())
}
