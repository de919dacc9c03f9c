//! Evaluates the curvature operators on a cone, a plane and a photograph.
//!
//! Usage: `cargo run --example curvature_operators [OUT_DIR]`. The weighted
//! mean curvature maps of the photograph are written to OUT_DIR (default: the
//! system temp directory) as `value * 2 + 128`.

use std::path::PathBuf;

use curveflow::io::{load_gray, save_gray};
use curveflow::operators::{
    area_gradient_fd, mean_curvature_fd, wmc_fd, wmc_half_laplace, DiffConfig,
};
use curveflow::synth;

fn main() -> curveflow::Result<()> {
    let out_dir = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(std::env::temp_dir);
    let diff = DiffConfig::default();

    let cone = synth::cone(201);
    let h = mean_curvature_fd(&cone, &diff);
    for r in [10, 20, 40] {
        println!(
            "cone: H at r={r:<2} = {:.5} (exact {:.5})",
            h.get(100 + r, 100),
            0.5 / r as f64
        );
    }

    let plane = synth::affine(32, 32, 1.5, -0.5, 80.0);
    let inner = |img: &curveflow::Image2D| {
        img.crop(1, 1, 30, 30)
            .unwrap()
            .data()
            .iter()
            .fold(0.0f64, |m, v| m.max(v.abs()))
    };
    println!(
        "plane 1.5x - 0.5y: max |H^w| half-Laplace {:.3}, finite differences {:.1e}",
        inner(&wmc_half_laplace(&plane)),
        inner(&wmc_fd(&plane, &diff))
    );

    let photo = load_gray(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/tests/data/camera256.png"
    ))?;
    let half = wmc_half_laplace(&photo);
    let fd = wmc_fd(&photo, &diff);
    let area = area_gradient_fd(&photo);
    println!(
        "camera: mean |H^w| half-Laplace {:.2}, fd {:.2}, mean |area gradient| {:.2}",
        half.map(f64::abs).mean(),
        fd.map(f64::abs).mean(),
        area.map(f64::abs).mean()
    );
    let display = |img: &curveflow::Image2D| img.map(|v| 2.0 * v + 128.0);
    save_gray(out_dir.join("camera_wmc_half.png"), &display(&half))?;
    save_gray(out_dir.join("camera_wmc_fd.png"), &display(&fd))?;
    println!(
        "wrote camera_wmc_half.png and camera_wmc_fd.png to {}",
        out_dir.display()
    );
    Ok(())
}
