//! Synthetic test scenes: planes, cones, noisy steps, sampled arcs and a
//! flag-and-cross scene with sharp rectangles on sinusoidal texture.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::image::Image2D;

/// `U(x, y) = a x + b y + c`.
pub fn affine(width: usize, height: usize, a: f64, b: f64, c: f64) -> Image2D {
    Image2D::from_fn(width, height, |x, y| a * x as f64 + b * y as f64 + c)
}

/// `U = sqrt((x - cx)^2 + (y - cy)^2)` on an `n x n` grid centered at `(n-1)/2`.
pub fn cone(n: usize) -> Image2D {
    let c = (n as f64 - 1.0) / 2.0;
    Image2D::from_fn(n, n, |x, y| (x as f64 - c).hypot(y as f64 - c))
}

/// Uniform random values in `[lo, hi)`.
pub fn random_image(width: usize, height: usize, lo: f64, hi: f64, seed: u64) -> Image2D {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Image2D::from_fn(width, height, |_, _| rng.random_range(lo..hi))
}

/// Adds independent uniform noise in `[-amplitude, amplitude]`.
pub fn add_uniform_noise(img: &Image2D, amplitude: f64, seed: u64) -> Image2D {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    img.map(|v| v + rng.random_range(-amplitude..=amplitude))
}

/// Adds independent zero-mean Gaussian noise.
pub fn add_gaussian_noise(img: &Image2D, sigma: f64, seed: u64) -> Image2D {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = Normal::new(0.0, sigma).expect("sigma must be finite and non-negative");
    img.map(|v| v + normal.sample(&mut rng))
}

/// Vertical step edge: `low` left of column `width / 2`, `high` from it on.
pub fn step_edge(width: usize, height: usize, low: f64, high: f64) -> Image2D {
    let split = width / 2;
    Image2D::from_fn(width, height, |x, _| if x < split { low } else { high })
}

/// Sample `k` of a circle of `radius` cut into `samples_per_quarter` equal
/// angular cells per quarter turn; the sample sits at the cell center.
/// Negative `k` continues the circle backwards.
pub fn arc_point(radius: f64, samples_per_quarter: usize, k: isize) -> [f64; 2] {
    let step = PI / 2.0 / samples_per_quarter as f64;
    let t = (k as f64 + 0.5) * step;
    [radius * t.cos(), radius * t.sin()]
}

/// The samples of [`arc_point`] covering `quarters` quarter turns.
pub fn sampled_arc(radius: f64, samples_per_quarter: usize, quarters: usize) -> Vec<[f64; 2]> {
    (0..(samples_per_quarter * quarters) as isize)
        .map(|k| arc_point(radius, samples_per_quarter, k))
        .collect()
}

/// A soft-edged disc of unit physical radius rendered so that one quarter
/// of its boundary spans `samples_per_quarter` pixels.
///
/// The same continuous scene, `contrast / (1 + exp((r - 1) / 0.15))` on
/// `[-2.2, 2.2]^2`, is sampled with spacing `pi / (2 n)`; changing `n`
/// changes only the sampling rate.
pub fn soft_disc(samples_per_quarter: usize, contrast: f64) -> Image2D {
    let h = PI / (2.0 * samples_per_quarter as f64);
    let half = (2.2 / h).ceil() as usize;
    let n = 2 * half + 1;
    Image2D::from_fn(n, n, |x, y| {
        let px = (x as f64 - half as f64) * h;
        let py = (y as f64 - half as f64) * h;
        let r = px.hypot(py);
        contrast / (1.0 + ((r - 1.0) / 0.15).exp())
    })
}

/// Side length of [`flag_and_cross`].
pub const FLAG_SIZE: usize = 128;
/// Column and row range of a profile crossing the top edge of the cross's
/// horizontal arm in [`flag_and_cross`].
pub const FLAG_EDGE_COLUMN: usize = 45;
pub const FLAG_EDGE_ROWS: std::ops::Range<usize> = 48..60;

/// A 128x128 scene: sinusoidal sky, a shaded waving flag with a bright
/// cross, and rows of small sharp squares.
pub fn flag_and_cross() -> Image2D {
    let mut img = Image2D::from_fn(FLAG_SIZE, FLAG_SIZE, |x, y| {
        let (xf, yf) = (x as f64, y as f64);
        let sky = 60.0 + 15.0 * (2.0 * PI * yf / 37.0).sin() + 10.0 * (2.0 * PI * xf / 53.0).sin();
        let in_flag = (16..112).contains(&x) && (24..104).contains(&y);
        if !in_flag {
            return sky;
        }
        let shade = 1.0 + 0.2 * (2.0 * PI * (xf + 0.5 * yf) / 20.0).sin();
        let vertical_arm = (xf - 64.0).abs() < 10.0 && (40..88).contains(&y);
        let horizontal_arm = (yf - 64.0).abs() < 10.0 && (40..88).contains(&x);
        let base = if vertical_arm || horizontal_arm {
            210.0
        } else {
            110.0
        };
        base * shade
    });
    for i in 0..4 {
        for j in 0..12 {
            let x0 = 4 + 10 * j;
            let y0 = 2 + if i >= 2 { 106 } else { 0 } + 10 * (i % 2);
            let value = 20.0 + 60.0 * ((i + j) % 3) as f64;
            for y in y0..y0 + 4 {
                for x in x0..x0 + 4 {
                    img.set(x, y, value);
                }
            }
        }
    }
    img
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sampled_arc_lies_on_circle() {
        for p in sampled_arc(3.0, 6, 2) {
            assert!((p[0].hypot(p[1]) - 3.0).abs() < 1e-12);
        }
        assert_eq!(sampled_arc(1.0, 8, 2).len(), 16);
    }

    #[test]
    fn soft_disc_resolution_tracks_sampling() {
        let coarse = soft_disc(6, 100.0);
        let fine = soft_disc(8, 100.0);
        assert!(fine.width() > coarse.width());
        let c = coarse.width() / 2;
        assert!(coarse.get(c, c) > 99.0);
        assert!(coarse.get(0, 0) < 1e-3);
    }

    #[test]
    fn flag_scene_has_sharp_cross_edge() {
        let img = flag_and_cross();
        let x = FLAG_EDGE_COLUMN;
        assert!(img.get(x, 55) - img.get(x, 54) > 50.0);
    }

    #[test]
    fn noise_is_seeded() {
        let base = Image2D::zeros(4, 4);
        assert_eq!(
            add_uniform_noise(&base, 5.0, 1),
            add_uniform_noise(&base, 5.0, 1)
        );
        assert_ne!(
            add_gaussian_noise(&base, 5.0, 1),
            add_gaussian_noise(&base, 5.0, 2)
        );
    }
}
