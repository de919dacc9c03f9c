//! SSIM of a synthetic scene against increasingly noisy copies.

use curveflow::metrics::{ssim, SsimConfig};
use curveflow::synth::{add_gaussian_noise, flag_and_cross};

fn main() -> curveflow::Result<()> {
    let clean = flag_and_cross();
    let cfg = SsimConfig::default();
    println!("identical: {:.4}", ssim(&clean, &clean, &cfg)?);
    for sigma in [5.0, 10.0, 20.0, 40.0] {
        let noisy = add_gaussian_noise(&clean, sigma, 1);
        println!("sigma {sigma:>4}: {:.4}", ssim(&clean, &noisy, &cfg)?);
    }
    println!(
        "inverted:  {:.4}",
        ssim(&clean, &clean.map(|v| 255.0 - v), &cfg)?
    );
    Ok(())
}
