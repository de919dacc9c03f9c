//! Times the half-Laplace operator and checks that thread count does not
//! change its output.
//!
//! Usage: `cargo run --release --example throughput [THREADS]`.

use curveflow::bench::{bench_wmc, checksums_by_threads};
use curveflow::parallel::available_threads;

fn main() -> curveflow::Result<()> {
    let threads = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or_else(available_threads);
    let report = bench_wmc(&[256, 512, 1024, 2048], 5, threads)?;
    println!("{threads} thread(s), median of {} runs", report.reps);
    let mut prev: Option<f64> = None;
    for e in &report.entries {
        let ratio = prev
            .map(|p| format!("  x{:.2} vs previous", e.median_seconds / p))
            .unwrap_or_default();
        println!(
            "{:>5}^2: {:>9.3} ms  {:>7.1} Mpx/s{ratio}",
            e.size,
            e.median_seconds * 1e3,
            e.throughput / 1e6
        );
        prev = Some(e.median_seconds);
    }
    let sums = checksums_by_threads(512, &[1, 2, 4])?;
    println!("checksums for 1, 2, 4 threads: {:x?}", sums);
    report.write_csv(std::io::stdout().lock())?;
    Ok(())
}
