//! l1 smoothing over a range of lambda, and the area model against the
//! eps-TV baseline on a disc phantom.
//!
//! Usage: `cargo run --release --example smoothing [OUT_DIR]`.

use std::path::PathBuf;

use curveflow::io::{load_gray, save_gray};
use curveflow::metrics::{ssim, SsimConfig};
use curveflow::solvers::{phantom_center, phantom_discs, solve, SmoothModel, SolverConfig};

fn main() -> curveflow::Result<()> {
    let out_dir = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(std::env::temp_dir);
    let f = load_gray(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/tests/data/camera256.png"
    ))?;
    for lambda in [1.0, 3.0, 10.0, 20.0] {
        let rep = solve(&f, &SolverConfig::new(SmoothModel::L1Area, lambda))?;
        let s = ssim(&f, &rep.image, &SsimConfig::default())?;
        println!(
            "l1 lambda {lambda:>4}: SSIM {s:.4} after {} iterations (step {})",
            rep.iterations, rep.dt
        );
        save_gray(
            out_dir.join(format!("camera_l1_lambda{lambda}.png")),
            &rep.image,
        )?;
    }

    let contrasts = [50.0, 100.0, 200.0];
    let phantom = phantom_discs(96, 3, 3, &contrasts, &[4.0, 7.0, 11.0])?;
    let models = [
        ("area", SolverConfig::new(SmoothModel::L2Area, 150.0)),
        (
            "eps-tv",
            SolverConfig::new(SmoothModel::L2EpsTv, 1000.0).with_dt(2e-4),
        ),
    ];
    println!(
        "disc centre value / contrast (rows: radius 4, 7, 11; columns: contrast 50, 100, 200)"
    );
    for (name, cfg) in models {
        let u = solve(&phantom, &cfg)?.image;
        println!("{name}");
        for row in 0..3 {
            let cells: Vec<String> = (0..3)
                .map(|col| {
                    let (x, y) = phantom_center(96, 3, 3, row, col);
                    format!("{:.3}", u.get(x, y) / contrasts[col])
                })
                .collect();
            println!("  {}", cells.join("  "));
        }
        save_gray(out_dir.join(format!("phantom_{name}.png")), &u)?;
    }
    println!("images written to {}", out_dir.display());
    Ok(())
}
