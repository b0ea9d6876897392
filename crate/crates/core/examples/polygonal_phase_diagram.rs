//! Polygonal criteria on the autonomous x' = -(x - Gamma_{c,d}(t))^2 + 1.
//!
//! `+` certified tracking, `x` certified tipping, `.` no certificate.

use tipping::criteria::{check_polygonal, CertVerdict};
use tipping::fields::{make_quadratic, ForcingProfile};
use tipping::pullback::{attractor_repeller, PairConfig};

fn main() -> tipping::Result<()> {
    let f = make_quadratic(&ForcingProfile::constant(1.0));
    let ds: Vec<f64> = (0..=24).map(|i| 0.125 * i as f64).collect();
    print!("   c \\ d ");
    for d in &ds {
        print!("{}", if (d * 2.0).fract() == 0.0 { '|' } else { ' ' });
    }
    println!();
    for c in [0.25, 0.5, 1.0, 2.0, 4.0, 8.0, f64::INFINITY] {
        let w = if c.is_finite() { (1.0 / c).max(30.0) } else { 30.0 } + 40.0;
        let pair = attractor_repeller(&f, (-w, w), &PairConfig::default())?;
        print!("{c:>8} ");
        for &d in &ds {
            let cert = check_polygonal(&pair, c, d)?;
            let mark = match (cert.fired(), cert.verdict) {
                (true, CertVerdict::Tracking) => '+',
                (true, _) => 'x',
                _ => '.',
            };
            print!("{mark}");
        }
        println!();
    }
    println!("d from 0 to 3 in steps of 1/8; tracking for d <= 1, tipping for d >= 1 + 1/c");
    Ok(())
}
