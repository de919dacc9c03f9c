//! Distribution statistics of gradients and weighted mean curvature over an
//! image corpus.
//!
//! Gradients are signed forward differences along both axes, taken only
//! where both samples lie inside the image. Histogram bins have width 1 and
//! are centred on the integers `-256..=256`; values beyond the range fall
//! into the end bins. RGB images contribute each channel separately.

use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::image::Image2D;
use crate::io::{list_images, load_channels};
use crate::operators::{
    area_gradient_fd, gradient_magnitude, wmc_fd, wmc_half_laplace, DiffConfig,
};

/// Largest bin centre magnitude.
pub const HIST_RANGE: i64 = 256;
const BINS: usize = (2 * HIST_RANGE + 1) as usize;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HistogramStats {
    counts: Vec<u64>,
    total: u64,
}

impl Default for HistogramStats {
    fn default() -> Self {
        Self::new()
    }
}

impl HistogramStats {
    pub fn new() -> Self {
        Self {
            counts: vec![0; BINS],
            total: 0,
        }
    }

    /// Builds a histogram from counts indexed by bin, `counts[0]` being the
    /// bin centred on `-256`.
    pub fn from_counts(counts: Vec<u64>) -> Result<Self> {
        if counts.len() != BINS {
            return Err(Error::Parameter(format!(
                "expected {BINS} bins, got {}",
                counts.len()
            )));
        }
        let total = counts.iter().sum();
        Ok(Self { counts, total })
    }

    fn bin_of(v: f64) -> usize {
        let k = v.round().clamp(-HIST_RANGE as f64, HIST_RANGE as f64) as i64;
        (k + HIST_RANGE) as usize
    }

    pub fn add(&mut self, v: f64) {
        self.counts[Self::bin_of(v)] += 1;
        self.total += 1;
    }

    pub fn extend(&mut self, values: impl IntoIterator<Item = f64>) {
        for v in values {
            self.add(v);
        }
    }

    pub fn merge(&mut self, other: &Self) {
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            *a += b;
        }
        self.total += other.total;
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    /// Centre of bin `i`.
    pub fn bin_center(i: usize) -> f64 {
        i as f64 - HIST_RANGE as f64
    }

    /// The `BINS + 1` uniform bin edges.
    pub fn bin_edges() -> Vec<f64> {
        (0..=BINS)
            .map(|i| i as f64 - HIST_RANGE as f64 - 0.5)
            .collect()
    }

    pub fn probability(&self, i: usize) -> f64 {
        if self.total == 0 {
            0.0
        } else {
            self.counts[i] as f64 / self.total as f64
        }
    }

    /// Natural log of the bin probability; `-inf` for empty bins.
    pub fn log_probability(&self) -> Vec<f64> {
        (0..BINS).map(|i| self.probability(i).ln()).collect()
    }

    /// Fraction of values whose bin centre has magnitude at most `v`.
    pub fn abs_cdf(&self, v: f64) -> f64 {
        if self.total == 0 {
            return 0.0;
        }
        let inside: u64 = self
            .counts
            .iter()
            .enumerate()
            .filter(|&(i, _)| Self::bin_center(i).abs() <= v)
            .map(|(_, c)| c)
            .sum();
        inside as f64 / self.total as f64
    }

    /// `abs_cdf` at the integers `0..=256`.
    pub fn abs_cdf_table(&self) -> Vec<f64> {
        (0..=HIST_RANGE).map(|v| self.abs_cdf(v as f64)).collect()
    }
}

/// Histograms of one corpus.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CorpusStats {
    pub gradient: HistogramStats,
    pub wmc: HistogramStats,
    pub images: usize,
}

impl CorpusStats {
    /// Largest `p(|grad| <= v) - p(|H^w| <= v)` over `v` in `1..=255`, with
    /// the threshold where it occurs. A non-positive value means the WMC
    /// distribution dominates everywhere.
    pub fn worst_dominance_gap(&self) -> (f64, u32) {
        (1..=255u32)
            .map(|v| {
                let v_f = f64::from(v);
                (self.gradient.abs_cdf(v_f) - self.wmc.abs_cdf(v_f), v)
            })
            .fold((f64::NEG_INFINITY, 0), |best, cur| {
                if cur.0 > best.0 {
                    cur
                } else {
                    best
                }
            })
    }
}

/// Adds the signed forward differences and half-Laplace WMC of one channel.
pub fn accumulate_channel(img: &Image2D, grad: &mut HistogramStats, wmc: &mut HistogramStats) {
    let (w, h) = img.dims();
    for y in 0..h {
        let row = img.row(y);
        grad.extend(row.windows(2).map(|p| p[1] - p[0]));
        if y + 1 < h {
            let next = img.row(y + 1);
            grad.extend(next.iter().zip(row).map(|(b, a)| b - a));
        }
    }
    debug_assert_eq!(w * h, img.len());
    wmc.extend(wmc_half_laplace(img).data().iter().copied());
}

fn corpus_files(dir: &Path) -> Result<Vec<std::path::PathBuf>> {
    let files = list_images(dir)?;
    if files.is_empty() {
        return Err(Error::EmptyCorpus(dir.to_path_buf()));
    }
    Ok(files)
}

/// Pooled gradient and WMC histograms of every image in `dir`.
pub fn corpus_stats(dir: impl AsRef<Path>) -> Result<CorpusStats> {
    let files = corpus_files(dir.as_ref())?;
    let parts = files
        .par_iter()
        .map(|path| {
            let mut grad = HistogramStats::new();
            let mut wmc = HistogramStats::new();
            for c in load_channels(path)? {
                accumulate_channel(&c, &mut grad, &mut wmc);
            }
            Ok((grad, wmc))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut out = CorpusStats {
        gradient: HistogramStats::new(),
        wmc: HistogramStats::new(),
        images: files.len(),
    };
    for (g, w) in &parts {
        out.gradient.merge(g);
        out.wmc.merge(w);
    }
    Ok(out)
}

/// Least-squares fit of `-ln p = coef * sqrt|x| + intercept`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SparsityFit {
    pub coef: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub bins_used: usize,
}

/// Fits the square-root sparsity model to the non-empty bins of `h`.
///
/// The intercept absorbs the normalization of `p`, so the coefficient only
/// reflects the shape of the tail.
pub fn fit_sparsity_model(h: &HistogramStats) -> Result<SparsityFit> {
    let points: Vec<(f64, f64)> = (0..BINS)
        .filter(|&i| h.counts[i] > 0)
        .map(|i| {
            (
                HistogramStats::bin_center(i).abs().sqrt(),
                -h.probability(i).ln(),
            )
        })
        .collect();
    let n = points.len() as f64;
    if points.len() < 2 {
        return Err(Error::Fit(format!(
            "need at least two non-empty bins, got {}",
            points.len()
        )));
    }
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = points.iter().map(|p| (p.1 - my).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::Fit(
            "all non-empty bins have the same magnitude".into(),
        ));
    }
    let coef = sxy / sxx;
    let intercept = my - coef * mx;
    let sse: f64 = points
        .iter()
        .map(|p| (p.1 - coef * p.0 - intercept).powi(2))
        .sum();
    let r_squared = if syy == 0.0 { 1.0 } else { 1.0 - sse / syy };
    Ok(SparsityFit {
        coef,
        intercept,
        r_squared,
        bins_used: points.len(),
    })
}

/// One pixel of the area-gradient versus WMC comparison.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScatterSample {
    pub area_gradient: f64,
    pub wmc: f64,
    pub grad_norm: f64,
}

/// Upper bound on the number of scatter samples.
pub const MAX_SCATTER_SAMPLES: usize = 100_000;

/// Uniform sample (reservoir sampling over all pixels of all channels, in
/// sorted file order) of `(area_gradient_fd, wmc_fd, |grad U|)` triples.
pub fn area_grad_scatter(
    dir: impl AsRef<Path>,
    max_samples: usize,
    seed: u64,
) -> Result<Vec<ScatterSample>> {
    let files = corpus_files(dir.as_ref())?;
    let diff = DiffConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut reservoir: Vec<ScatterSample> =
        Vec::with_capacity(max_samples.min(MAX_SCATTER_SAMPLES));
    let mut seen: u64 = 0;
    for path in files {
        for c in load_channels(&path)? {
            let area = area_gradient_fd(&c);
            let wmc = wmc_fd(&c, &diff);
            let norm = gradient_magnitude(&c);
            for i in 0..c.len() {
                let s = ScatterSample {
                    area_gradient: area.data()[i],
                    wmc: wmc.data()[i],
                    grad_norm: norm.data()[i],
                };
                seen += 1;
                if reservoir.len() < max_samples {
                    reservoir.push(s);
                } else if max_samples > 0 {
                    let j = rng.random_range(0..seen);
                    if (j as usize) < max_samples {
                        reservoir[j as usize] = s;
                    }
                }
            }
        }
    }
    Ok(reservoir)
}

/// Writes samples as CSV with header `area_gradient,wmc,grad_norm`.
pub fn write_scatter_csv<W: std::io::Write>(out: W, samples: &[ScatterSample]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["area_gradient", "wmc", "grad_norm"])?;
    for s in samples {
        w.write_record([
            s.area_gradient.to_string(),
            s.wmc.to_string(),
            s.grad_norm.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Writes the two histograms side by side: bin centre, counts and log
/// probabilities.
pub fn write_histogram_csv<W: std::io::Write>(out: W, stats: &CorpusStats) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["bin", "grad_count", "wmc_count", "grad_logp", "wmc_logp"])?;
    let (gl, wl) = (
        stats.gradient.log_probability(),
        stats.wmc.log_probability(),
    );
    for i in 0..BINS {
        w.write_record([
            HistogramStats::bin_center(i).to_string(),
            stats.gradient.counts[i].to_string(),
            stats.wmc.counts[i].to_string(),
            gl[i].to_string(),
            wl[i].to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Writes `p(|grad| <= v)` and `p(|H^w| <= v)` for `v = 0..=256`.
pub fn write_cdf_csv<W: std::io::Write>(out: W, stats: &CorpusStats) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["v", "grad_cdf", "wmc_cdf"])?;
    let (g, m) = (stats.gradient.abs_cdf_table(), stats.wmc.abs_cdf_table());
    for (v, (a, b)) in g.iter().zip(&m).enumerate() {
        w.write_record([v.to_string(), a.to_string(), b.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

/// Pearson correlation of two equally long series; `None` when either is
/// constant or they are empty.
pub fn pearson(xs: &[f64], ys: &[f64]) -> Option<f64> {
    if xs.len() != ys.len() || xs.is_empty() {
        return None;
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
        syy += (y - my) * (y - my);
    }
    (sxx > 0.0 && syy > 0.0).then(|| sxy / (sxx * syy).sqrt())
}
