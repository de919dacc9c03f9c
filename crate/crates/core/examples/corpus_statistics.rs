//! Gradient versus weighted mean curvature statistics of an image folder.
//!
//! Usage: `cargo run --release --example corpus_statistics [DIR]`; defaults
//! to the bundled natural images.

use curveflow::stats::{
    area_grad_scatter, corpus_stats, fit_sparsity_model, pearson, MAX_SCATTER_SAMPLES,
};

fn main() -> curveflow::Result<()> {
    let dir = std::env::args()
        .nth(1)
        .unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/tests/data/natural").to_string());
    let s = corpus_stats(&dir)?;
    println!(
        "{} images, {} gradient samples, {} WMC samples",
        s.images,
        s.gradient.total(),
        s.wmc.total()
    );
    println!("   v   p(|grad|<=v)  p(|H^w|<=v)");
    for v in [1.0, 5.0, 10.0, 30.0, 60.0] {
        println!(
            "{v:>4}   {:.4}        {:.4}",
            s.gradient.abs_cdf(v),
            s.wmc.abs_cdf(v)
        );
    }
    let (gap, at) = s.worst_dominance_gap();
    println!("largest p(|grad|<=v) - p(|H^w|<=v) over v=1..255: {gap:.2e} at v={at}");

    for (name, h) in [("H^w", &s.wmc), ("grad", &s.gradient)] {
        let fit = fit_sparsity_model(h)?;
        println!(
            "{name:>4}: -ln p ~ {:.3} sqrt|x| + {:.3}  (R^2 {:.3})",
            fit.coef, fit.intercept, fit.r_squared
        );
    }

    let samples = area_grad_scatter(&dir, MAX_SCATTER_SAMPLES, 0)?;
    let steep: Vec<_> = samples.iter().filter(|p| p.grad_norm >= 10.0).collect();
    let a: Vec<f64> = steep.iter().map(|p| p.area_gradient).collect();
    let w: Vec<f64> = steep.iter().map(|p| p.wmc).collect();
    if let Some(r) = pearson(&a, &w) {
        println!(
            "area gradient vs H^w where |grad| >= 10: Pearson {r:.4} over {} samples",
            a.len()
        );
    }
    Ok(())
}
