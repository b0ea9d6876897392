//! Phase-induced tipping: s -> lambda*(Gamma, p_s) for p with constant 0.83.

use tipping::bifurcation::{scan_phase, ClassifyConfig};
use tipping::fields::{ForcingProfile, Transition};

fn main() {
    let p = ForcingProfile::quasi_periodic(0.83);
    let s: Vec<f64> = (0..=30).map(|i| -15.0 + i as f64).collect();
    for c in [0.5, 2.0] {
        let scan = scan_phase(&p, &Transition::arctan(), c, &s, 0.01, 1e-4, &ClassifyConfig::default());
        println!("c = {c}: total tracking {}", scan.total_tracking);
        for r in &scan.rows {
            match r.value() {
                Some(l) => println!("  s = {:+5.1}  lambda* = {l:+.4}", r.param),
                None => println!("  s = {:+5.1}  {}", r.param, r.verdict),
            }
        }
        println!("  sign changes between {:?}", scan.sign_changes);
    }
}
