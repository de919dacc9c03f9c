//! Structural similarity (SSIM) with a Gaussian window.
//!
//! Local statistics are computed only where the window fits entirely inside
//! the image, and the score is the mean of the local SSIM map.

use crate::error::{param, Result};
use crate::image::{par_rows, Image2D};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SsimConfig {
    /// Odd window side, at least 3.
    pub window: usize,
    pub sigma: f64,
    pub k1: f64,
    pub k2: f64,
    /// Dynamic range of the pixel values.
    pub range: f64,
}

impl Default for SsimConfig {
    fn default() -> Self {
        Self {
            window: 11,
            sigma: 1.5,
            k1: 0.01,
            k2: 0.03,
            range: 255.0,
        }
    }
}

impl SsimConfig {
    pub fn validate(&self) -> Result<()> {
        if self.window < 3 || self.window.is_multiple_of(2) {
            return Err(param(format!(
                "SSIM window must be odd and >= 3, got {}",
                self.window
            )));
        }
        if !(self.sigma > 0.0 && self.range > 0.0 && self.k1 > 0.0 && self.k2 > 0.0) {
            return Err(param("SSIM sigma, range and constants must be positive"));
        }
        Ok(())
    }

    fn weights(&self) -> Vec<f64> {
        let c = (self.window / 2) as f64;
        let w: Vec<f64> = (0..self.window)
            .map(|i| {
                let d = i as f64 - c;
                (-d * d / (2.0 * self.sigma * self.sigma)).exp()
            })
            .collect();
        let total: f64 = w.iter().sum();
        w.into_iter().map(|v| v / total).collect()
    }
}

/// Separable weighted average over every fully contained window.
fn filter_valid(img: &Image2D, w: &[f64]) -> Image2D {
    let n = w.len();
    let (width, height) = img.dims();
    let ow = width + 1 - n;
    let oh = height + 1 - n;
    let horiz = par_rows(ow, height, |y, row| {
        let src = img.row(y);
        for (x, out) in row.iter_mut().enumerate() {
            *out = w.iter().zip(&src[x..x + n]).map(|(a, b)| a * b).sum();
        }
    });
    par_rows(ow, oh, |y, row| {
        for (x, out) in row.iter_mut().enumerate() {
            *out = w
                .iter()
                .enumerate()
                .map(|(k, a)| a * horiz.get(x, y + k))
                .sum();
        }
    })
}

/// Local SSIM map over the valid region.
pub fn ssim_map(a: &Image2D, b: &Image2D, cfg: &SsimConfig) -> Result<Image2D> {
    cfg.validate()?;
    a.check_same_dims(b)?;
    let (w, h) = a.dims();
    if w < cfg.window || h < cfg.window {
        return Err(param(format!(
            "image {w}x{h} is smaller than the {} pixel SSIM window",
            cfg.window
        )));
    }
    let g = cfg.weights();
    let c1 = (cfg.k1 * cfg.range).powi(2);
    let c2 = (cfg.k2 * cfg.range).powi(2);
    let mu_a = filter_valid(a, &g);
    let mu_b = filter_valid(b, &g);
    let aa = filter_valid(&a.map(|v| v * v), &g);
    let bb = filter_valid(&b.map(|v| v * v), &g);
    let ab = filter_valid(&a.zip_map(b, |x, y| x * y)?, &g);
    let (ow, oh) = mu_a.dims();
    Ok(Image2D::from_fn(ow, oh, |x, y| {
        let (ma, mb) = (mu_a.get(x, y), mu_b.get(x, y));
        let va = aa.get(x, y) - ma * ma;
        let vb = bb.get(x, y) - mb * mb;
        let cov = ab.get(x, y) - ma * mb;
        ((2.0 * ma * mb + c1) * (2.0 * cov + c2)) / ((ma * ma + mb * mb + c1) * (va + vb + c2))
    }))
}

pub fn ssim(a: &Image2D, b: &Image2D, cfg: &SsimConfig) -> Result<f64> {
    Ok(ssim_map(a, b, cfg)?.mean())
}

/// Mean SSIM over corresponding channels.
pub fn ssim_channels(a: &[Image2D], b: &[Image2D], cfg: &SsimConfig) -> Result<f64> {
    if a.len() != b.len() || a.is_empty() {
        return Err(param(format!(
            "channel count mismatch: {} vs {}",
            a.len(),
            b.len()
        )));
    }
    let mut total = 0.0;
    for (x, y) in a.iter().zip(b) {
        total += ssim(x, y, cfg)?;
    }
    Ok(total / a.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;
    use crate::synth;

    fn checker(n: usize) -> Image2D {
        Image2D::from_fn(
            n,
            n,
            |x, y| if (x / 4 + y / 4) % 2 == 0 { 0.0 } else { 255.0 },
        )
    }

    #[test]
    fn identical_images_score_one() {
        let a = synth::random_image(24, 20, 0.0, 255.0, 3);
        assert_eq!(ssim(&a, &a, &SsimConfig::default()).unwrap(), 1.0);
    }

    #[test]
    fn inverted_binary_is_negative() {
        let a = checker(32);
        let b = a.map(|v| 255.0 - v);
        let s = ssim(&a, &b, &SsimConfig::default()).unwrap();
        assert!(s < 0.0, "{s}");
    }

    #[test]
    fn symmetric() {
        let a = synth::random_image(30, 30, 0.0, 255.0, 1);
        let b = synth::random_image(30, 30, 0.0, 255.0, 2);
        let cfg = SsimConfig::default();
        let d = ssim(&a, &b, &cfg).unwrap() - ssim(&b, &a, &cfg).unwrap();
        assert!(d.abs() <= 1e-12);
    }

    #[test]
    fn noise_degrades_monotonically() {
        let clean = synth::flag_and_cross();
        let cfg = SsimConfig::default();
        let scores: Vec<f64> = [5.0, 10.0, 20.0]
            .iter()
            .map(|&s| ssim(&clean, &synth::add_gaussian_noise(&clean, s, 11), &cfg).unwrap())
            .collect();
        assert!(scores[0] > scores[1] && scores[1] > scores[2], "{scores:?}");
    }

    #[test]
    fn errors() {
        let a = Image2D::zeros(16, 16);
        assert!(matches!(
            ssim(&a, &Image2D::zeros(16, 17), &SsimConfig::default()),
            Err(Error::DimensionMismatch { .. })
        ));
        let even = SsimConfig {
            window: 4,
            ..Default::default()
        };
        assert!(ssim(&a, &a, &even).is_err());
        assert!(ssim(
            &Image2D::zeros(5, 5),
            &Image2D::zeros(5, 5),
            &SsimConfig::default()
        )
        .is_err());
    }

    #[test]
    fn window_weights_sum_to_one() {
        let w = SsimConfig::default().weights();
        assert_eq!(w.len(), 11);
        assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-15);
        assert!((w[5] - 0.266_011_12).abs() < 1e-6);
    }
}
