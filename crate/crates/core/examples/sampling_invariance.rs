//! Curvature energies of the same shape at two sampling rates.
//!
//! Summing plain curvature over samples grows with the number of samples,
//! while weighting each sample by its share of arc length does not.

use curveflow::energies::{arc_energies, energy, EnergyConfig, EnergyKind, WmcScheme};
use curveflow::synth::soft_disc;

fn main() -> curveflow::Result<()> {
    println!("half circle of radius 10");
    for n in [6, 8, 12] {
        let e = arc_energies(10.0, n, 2);
        println!(
            "  {n:>2} samples/quarter: sum H = {:.4}, sum H ds = {:.4}",
            e.curvature_sum, e.weighted_sum
        );
    }

    let mc = EnergyConfig::new(EnergyKind::Mc);
    let wmc = EnergyConfig::new(EnergyKind::Wmc).with_wmc_scheme(WmcScheme::FiniteDifference);
    let wmc_half = EnergyConfig::new(EnergyKind::Wmc);
    println!("soft disc rendered at increasing resolution");
    for n in [6, 8, 12] {
        let img = soft_disc(n, 100.0);
        println!(
            "  {n:>2} px/quarter ({}x{}): R_H {:.2}, R_Hw fd {:.1}, R_Hw half-Laplace {:.1}",
            img.width(),
            img.height(),
            energy(&img, &mc)?,
            energy(&img, &wmc)?,
            energy(&img, &wmc_half)?
        );
    }
    Ok(())
}
