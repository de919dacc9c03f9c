//! 3x3 stencils and the replicate-boundary correlation that applies them.

use crate::image::{neighborhood, par_rows, row_triplet, Image2D};

/// A 3x3 kernel indexed `[row][col]`.
///
/// Row 0 is the vertical offset -1 (the row above), column 0 is the
/// horizontal offset -1 (the column to the left). Stencils are applied as a
/// correlation, without flipping.
///
/// The weights are stored as numerators over a common denominator. Rational
/// kernels such as `1/20` then sum integer multiples of the pixels and divide
/// once, so a zero-sum stencil maps constant integer images to exactly zero.
#[derive(Clone, Copy, Debug)]
pub struct Stencil3 {
    taps: [[f64; 3]; 3],
    denominator: f64,
}

impl PartialEq for Stencil3 {
    fn eq(&self, other: &Self) -> bool {
        self.weights() == other.weights()
    }
}

impl Stencil3 {
    pub const fn new(weights: [[f64; 3]; 3]) -> Self {
        Self {
            taps: weights,
            denominator: 1.0,
        }
    }

    /// Stencil with weights `numerators / denominator`.
    ///
    /// # Panics
    /// If `denominator` is zero.
    pub fn rational(numerators: [[f64; 3]; 3], denominator: f64) -> Self {
        assert!(denominator != 0.0, "stencil denominator must be nonzero");
        Self {
            taps: numerators,
            denominator,
        }
    }

    /// Effective weights `numerators / denominator`.
    pub fn weights(&self) -> [[f64; 3]; 3] {
        self.taps.map(|row| row.map(|t| t / self.denominator))
    }

    pub fn numerators(&self) -> &[[f64; 3]; 3] {
        &self.taps
    }

    pub fn denominator(&self) -> f64 {
        self.denominator
    }

    /// Weight at vertical offset `dy` and horizontal offset `dx`, both in `-1..=1`.
    pub fn at(&self, dy: isize, dx: isize) -> f64 {
        self.taps[(dy + 1) as usize][(dx + 1) as usize] / self.denominator
    }

    pub fn center(&self) -> f64 {
        self.taps[1][1] / self.denominator
    }

    pub fn sum(&self) -> f64 {
        self.taps.iter().flatten().sum::<f64>() / self.denominator
    }

    pub fn l1_norm(&self) -> f64 {
        self.taps.iter().flatten().map(|w| w.abs()).sum::<f64>() / self.denominator.abs()
    }

    fn with_taps(&self, taps: [[f64; 3]; 3]) -> Self {
        Self {
            taps,
            denominator: self.denominator,
        }
    }

    /// Left/right mirror image.
    pub fn mirror_horizontal(&self) -> Self {
        let mut w = self.taps;
        for row in &mut w {
            row.reverse();
        }
        self.with_taps(w)
    }

    /// Top/bottom mirror image.
    pub fn mirror_vertical(&self) -> Self {
        let mut w = self.taps;
        w.reverse();
        self.with_taps(w)
    }

    /// Rotation by 90 degrees clockwise.
    pub fn rotate_cw(&self) -> Self {
        let mut w = [[0.0; 3]; 3];
        for (r, row) in w.iter_mut().enumerate() {
            for (c, v) in row.iter_mut().enumerate() {
                *v = self.taps[2 - c][r];
            }
        }
        self.with_taps(w)
    }

    /// Number of nonzero taps excluding the center.
    pub fn off_center_support(&self) -> usize {
        self.taps
            .iter()
            .flatten()
            .enumerate()
            .filter(|&(i, &w)| i != 4 && w != 0.0)
            .count()
    }

    /// Correlates the stencil with a clamped 3x3 neighbourhood.
    ///
    /// Numerator taps are visited in row-major order, zero taps are skipped
    /// and the sum is divided by the denominator at the end. Because the
    /// accumulator starts at `+0.0`, skipping a zero tap never changes the
    /// result for finite inputs.
    #[inline]
    pub(crate) fn apply_neighborhood(&self, n: &[[f64; 3]; 3]) -> f64 {
        let mut acc = 0.0;
        for (taps, row) in self.taps.iter().zip(n) {
            for (&w, &v) in taps.iter().zip(row) {
                if w != 0.0 {
                    acc += w * v;
                }
            }
        }
        acc / self.denominator
    }
}

/// Correlates `img` with `stencil` using replicate (clamp-to-edge) padding.
///
/// `out[y][x] = sum over (dy, dx) of stencil[dy][dx] * img[clamp(y + dy)][clamp(x + dx)]`.
/// Rows are processed in parallel; each output pixel is summed in a fixed
/// order so results are bit-identical for any thread count.
pub fn convolve3(img: &Image2D, stencil: &Stencil3) -> Image2D {
    par_rows(img.width(), img.height(), |y, out| {
        let rows = row_triplet(img, y);
        for (x, o) in out.iter_mut().enumerate() {
            *o = stencil.apply_neighborhood(&neighborhood(rows, x));
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::{kernel, KernelName};

    #[test]
    fn constant_image_gives_zero_everywhere() {
        let img = Image2D::filled(6, 5, 7.0);
        for name in KernelName::ALL {
            let out = convolve3(&img, &kernel(name));
            assert!(out.data().iter().all(|&v| v == 0.0), "{name:?}");
        }
    }

    #[test]
    fn impulse_center_with_h1() {
        let mut img = Image2D::zeros(3, 3);
        img.set(1, 1, 1.0);
        let out = convolve3(&img, &kernel(KernelName::H1));
        assert_eq!(out.get(1, 1), -1.0);
    }

    #[test]
    fn ramp_with_h2_vanishes_inside() {
        let img = Image2D::from_fn(5, 5, |x, _| x as f64);
        let out = convolve3(&img, &kernel(KernelName::H2));
        for y in 1..4 {
            for x in 1..4 {
                assert!(out.get(x, y).abs() < 1e-12, "({x},{y}) = {}", out.get(x, y));
            }
        }
    }

    #[test]
    fn correlation_does_not_flip() {
        // A single tap to the right picks up the right neighbour.
        let mut w = [[0.0; 3]; 3];
        w[1][2] = 1.0;
        let img = Image2D::from_fn(4, 1, |x, _| x as f64);
        let out = convolve3(&img, &Stencil3::new(w));
        assert_eq!(out.data(), &[1.0, 2.0, 3.0, 3.0]);
    }

    #[test]
    fn rotations_compose_to_identity() {
        let s = kernel(KernelName::H5);
        assert_eq!(s.rotate_cw().rotate_cw().rotate_cw().rotate_cw(), s);
        assert_eq!(s.mirror_horizontal().mirror_horizontal(), s);
    }
}
