//! Coarse lambda*(c, h) surface of the piecewise-constant benchmark, as CSV.

use tipping::bifurcation::{scan_rate_step, to_csv, ClassifyConfig};
use tipping::cli::classify_config_for;
use tipping::fields::{make_quadratic, ForcingProfile, Transition};

fn main() {
    let f = make_quadratic(&ForcingProfile::bench());
    let cs = [0.25, 0.5, 1.0, 2.0, 4.0];
    let hs = [0.0, 0.5, 1.0, 2.0, 4.0];
    let base = ClassifyConfig::default();
    let rows = scan_rate_step(&f, &Transition::arctan(), &cs, &hs, 1e-4, &|c| classify_config_for(&base, c));
    print!("{}", to_csv(&rows, "h"));
}
