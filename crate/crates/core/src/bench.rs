//! Timing of the half-Laplace operator on random images.

use std::time::Instant;

use crate::error::{param, Result};
use crate::operators::wmc_half_laplace;
use crate::parallel::with_threads;
use crate::synth::random_image;

pub const MIN_BENCH_SIDE: usize = 64;
pub const MIN_BENCH_REPS: usize = 3;

#[derive(Clone, Debug, PartialEq)]
pub struct BenchEntry {
    /// Image side; images are square.
    pub size: usize,
    pub pixels: usize,
    /// Wall time of each timed repetition, in seconds.
    pub times: Vec<f64>,
    pub median_seconds: f64,
    /// `pixels * reps / total time`.
    pub throughput: f64,
    /// Checksum of the operator output, identical for every thread count.
    pub checksum: u64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BenchReport {
    pub threads: usize,
    pub reps: usize,
    pub entries: Vec<BenchEntry>,
}

impl BenchReport {
    pub fn entry(&self, size: usize) -> Option<&BenchEntry> {
        self.entries.iter().find(|e| e.size == size)
    }

    pub fn write_csv<W: std::io::Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record([
            "size",
            "pixels",
            "threads",
            "reps",
            "median_seconds",
            "throughput_px_per_s",
            "checksum",
        ])?;
        for e in &self.entries {
            w.write_record([
                e.size.to_string(),
                e.pixels.to_string(),
                self.threads.to_string(),
                self.reps.to_string(),
                format!("{:.6e}", e.median_seconds),
                format!("{:.6e}", e.throughput),
                format!("{:016x}", e.checksum),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Seed of the benchmark image of side `size`.
pub fn bench_seed(size: usize) -> u64 {
    0x5eed_0000 + size as u64
}

fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Times [`wmc_half_laplace`] on a seeded random square image of each side
/// in `sizes`, using a pool of `threads` workers. One untimed warm-up run
/// precedes the `reps` timed runs.
pub fn bench_wmc(sizes: &[usize], reps: usize, threads: usize) -> Result<BenchReport> {
    if reps < MIN_BENCH_REPS {
        return Err(param(format!(
            "need at least {MIN_BENCH_REPS} repetitions, got {reps}"
        )));
    }
    if let Some(&s) = sizes.iter().find(|&&s| s < MIN_BENCH_SIDE) {
        return Err(param(format!(
            "bench sizes must be at least {MIN_BENCH_SIDE}, got {s}"
        )));
    }
    let entries = with_threads(threads, || {
        sizes
            .iter()
            .map(|&size| {
                let img = random_image(size, size, 0.0, 255.0, bench_seed(size));
                let checksum = wmc_half_laplace(&img).checksum();
                let times: Vec<f64> = (0..reps)
                    .map(|_| {
                        let start = Instant::now();
                        let out = wmc_half_laplace(&img);
                        let t = start.elapsed().as_secs_f64();
                        std::hint::black_box(out);
                        t
                    })
                    .collect();
                let total: f64 = times.iter().sum();
                let pixels = size * size;
                BenchEntry {
                    size,
                    pixels,
                    median_seconds: median(&times),
                    throughput: (pixels * reps) as f64 / total.max(f64::MIN_POSITIVE),
                    times,
                    checksum,
                }
            })
            .collect()
    })?;
    Ok(BenchReport {
        threads,
        reps,
        entries,
    })
}

/// Output checksum of the benchmark image of side `size` for each thread
/// count.
pub fn checksums_by_threads(size: usize, thread_counts: &[usize]) -> Result<Vec<u64>> {
    let img = random_image(size, size, 0.0, 255.0, bench_seed(size));
    thread_counts
        .iter()
        .map(|&t| with_threads(t, || wmc_half_laplace(&img).checksum()))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn report_shape() {
        let r = bench_wmc(&[64, 96], 3, 1).unwrap();
        assert_eq!(r.entries.len(), 2);
        let e = r.entry(96).unwrap();
        assert_eq!(e.pixels, 96 * 96);
        assert_eq!(e.times.len(), 3);
        assert!(e.throughput > 0.0 && e.median_seconds > 0.0);
        let mut csv = Vec::new();
        r.write_csv(&mut csv).unwrap();
        assert_eq!(String::from_utf8(csv).unwrap().lines().count(), 3);
    }

    #[test]
    fn invalid_parameters() {
        assert!(bench_wmc(&[64], 2, 1).is_err());
        assert!(bench_wmc(&[32], 3, 1).is_err());
        assert!(bench_wmc(&[64], 3, 0).is_err());
    }

    #[test]
    fn checksum_ignores_thread_count() {
        let sums = checksums_by_threads(80, &[1, 2, 3, 4]).unwrap();
        assert!(sums.windows(2).all(|w| w[0] == w[1]));
        assert_eq!(bench_wmc(&[80], 3, 2).unwrap().entries[0].checksum, sums[0]);
    }

    #[test]
    fn median_of_even_and_odd() {
        assert_eq!(median(&[3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&[4.0, 1.0, 2.0, 3.0]), 2.5);
    }
}
