//! Size thresholds and temperatures of the energy balance model.

use tipping::fields::climate_constants;

fn main() -> tipping::Result<()> {
    let k = climate_constants(0.9993, 1.0007, 1.690e-5, 1.835e-5)?;
    println!("d1 = {:.10}", k.d1);
    println!("d2 = {:.10}", k.d2);
    println!("T1 = {:.7} K", k.t1);
    println!("T2 = {:.7} K", k.t2);
    Ok(())
}
