//! Continuous-transition ladder on x' = -(x - Gamma(c t))^2 + p(t + s).

use tipping::bifurcation::{lambda_star, ClassifyConfig};
use tipping::criteria::{certify_continuous, search_half_width, Instance};
use tipping::fields::{make_quadratic, ForcingProfile, Transition};
use tipping::pullback::PairConfig;

fn main() -> tipping::Result<()> {
    let cfg = ClassifyConfig::default();
    for s in [-15.0, 0.0, 15.0] {
        let f = make_quadratic(&ForcingProfile::quasi_periodic(0.83).time_shift(s));
        let l0 = lambda_star(&f, &Transition::zero(), 1e-4, &cfg)?;
        for c in [0.2, 1.0, 3.0] {
            let g = Transition::arctan().rescale_time(c)?;
            let w = search_half_width(c);
            let inst = Instance::prepare(&f, &g, (-w, w), 40.0, &PairConfig::default())?;
            let certs = certify_continuous(&inst, Some(&l0))?;
            let l = lambda_star(&f, &g, 1e-4, &cfg)?;
            let last = certs.last().expect("ladder is never empty");
            println!(
                "s = {s:+5.1} c = {c:3.1}: {:<18} {:<11} margin {:+.4} budget {:.1e}  lambda* = {:+.4}",
                last.verdict.label(),
                last.criterion,
                last.margin,
                last.error_budget,
                l.value
            );
        }
    }
    Ok(())
}
