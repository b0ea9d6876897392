//! Critical shift lambda* of x' = -(x - Gamma^h(c t))^2 + p(t) + lambda.

use tipping::bifurcation::{classify, lambda_star, ClassifyConfig};
use tipping::fields::{make_quadratic, ForcingProfile, Transition};

fn main() -> tipping::Result<()> {
    let f = make_quadratic(&ForcingProfile::bench());
    let cfg = ClassifyConfig::default();
    for (c, h) in [(0.5, 1.0), (2.0, 1.0), (4.0, 3.0)] {
        let g = Transition::arctan().rescale_time(c)?.discretize(h)?;
        let l = lambda_star(&f, &g, 1e-5, &cfg)?;
        let v = classify(&f, &g, None, &cfg)?;
        println!(
            "c = {c}, h = {h}: lambda* = {:+.5} in [{:+.5}, {:+.5}] ({} bisections), verdict {} (gap {:.4})",
            l.value,
            l.bracket.0,
            l.bracket.1,
            l.iterations,
            v.case.label(),
            v.gap
        );
    }
    Ok(())
}
