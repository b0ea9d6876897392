//! Piecewise-constant ladder on the benchmark, checked against lambda*.

use tipping::bifurcation::{lambda_star, ClassifyConfig};
use tipping::cli::classify_config_for;
use tipping::criteria::{bundle_verdict, certify_piecewise, search_half_width, Instance};
use tipping::fields::{make_quadratic, ForcingProfile, Transition};
use tipping::pullback::PairConfig;

fn main() -> tipping::Result<()> {
    let f = make_quadratic(&ForcingProfile::bench());
    for (c, h) in [(0.5, 0.5), (1.0, 3.0), (2.0, 1.0), (4.0, 0.5), (6.0, 6.0)] {
        let g = Transition::arctan().rescale_time(c)?.discretize(h)?;
        let w = search_half_width(c);
        let inst = Instance::prepare(&f, &g, (-w, w), 2.0 * h + 40.0, &PairConfig::default())?;
        let certs = certify_piecewise(&inst)?;
        let l = lambda_star(&f, &g, 1e-4, &classify_config_for(&ClassifyConfig::default(), c))?;
        println!("c = {c}, h = {h}: {} (lambda* = {:+.4})", bundle_verdict(&certs).label(), l.value);
        for cert in &certs {
            println!(
                "    {:<12} {:<10} margin {:+.4e} budget {:.1e}{}",
                cert.criterion,
                cert.verdict.label(),
                cert.margin,
                cert.error_budget,
                if cert.fired() { "  fired" } else { "" }
            );
        }
    }
    Ok(())
}
