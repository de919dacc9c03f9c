//! Dense single-channel images and 8-bit interleaved pixel buffers.
//!
//! [`Image2D`] is the signal carrier for every operator in the crate. Values
//! are `f64` in row-major order with `x` the column and `y` the row. Nothing
//! constrains the intensity range; 8-bit data is widened on load and only
//! clamped and rounded again when converted back into a [`PixelBuffer`].

use crate::error::{Error, Result};
use rayon::prelude::*;

#[derive(Clone, Debug, PartialEq)]
pub struct Image2D {
    width: usize,
    height: usize,
    data: Vec<f64>,
}

impl Image2D {
    /// Image filled with `value`.
    ///
    /// Panics if either dimension is zero.
    pub fn filled(width: usize, height: usize, value: f64) -> Self {
        assert!(width > 0 && height > 0, "image dimensions must be positive");
        Self {
            width,
            height,
            data: vec![value; width * height],
        }
    }

    pub fn zeros(width: usize, height: usize) -> Self {
        Self::filled(width, height, 0.0)
    }

    /// Builds an image by evaluating `f(x, y)` at every pixel.
    ///
    /// Panics if either dimension is zero.
    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        assert!(width > 0 && height > 0, "image dimensions must be positive");
        let mut data = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                data.push(f(x, y));
            }
        }
        Self {
            width,
            height,
            data,
        }
    }

    pub fn from_vec(width: usize, height: usize, data: Vec<f64>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::Parameter(format!(
                "image dimensions must be positive, got {width}x{height}"
            )));
        }
        if data.len() != width * height {
            return Err(Error::Parameter(format!(
                "data length {} does not match {width}x{height}",
                data.len()
            )));
        }
        Ok(Self {
            width,
            height,
            data,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.data[y * self.width + x]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, value: f64) {
        self.data[y * self.width + x] = value;
    }

    /// Value at `(x, y)` with coordinates clamped to the image (replicate padding).
    #[inline]
    pub fn get_clamped(&self, x: isize, y: isize) -> f64 {
        let xc = x.clamp(0, self.width as isize - 1) as usize;
        let yc = y.clamp(0, self.height as isize - 1) as usize;
        self.data[yc * self.width + xc]
    }

    #[inline]
    pub fn row(&self, y: usize) -> &[f64] {
        &self.data[y * self.width..(y + 1) * self.width]
    }

    pub fn map(&self, mut f: impl FnMut(f64) -> f64) -> Self {
        Self {
            width: self.width,
            height: self.height,
            data: self.data.iter().map(|&v| f(v)).collect(),
        }
    }

    /// Pixelwise combination of two images of equal size.
    pub fn zip_map(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        self.check_same_dims(other)?;
        Ok(Self {
            width: self.width,
            height: self.height,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        })
    }

    pub fn check_same_dims(&self, other: &Self) -> Result<()> {
        if self.dims() != other.dims() {
            return Err(Error::DimensionMismatch {
                left_width: self.width,
                left_height: self.height,
                right_width: other.width,
                right_height: other.height,
            });
        }
        Ok(())
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    pub fn min(&self) -> f64 {
        self.data.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.data.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Sum in row-major order.
    pub fn sum(&self) -> f64 {
        self.data.iter().sum()
    }

    pub fn mean(&self) -> f64 {
        self.sum() / self.len() as f64
    }

    pub fn variance(&self) -> f64 {
        let m = self.mean();
        self.data.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / self.len() as f64
    }

    /// Euclidean inner product.
    pub fn dot(&self, other: &Self) -> Result<f64> {
        self.check_same_dims(other)?;
        Ok(self.data.iter().zip(&other.data).map(|(a, b)| a * b).sum())
    }

    /// Largest absolute pixel difference.
    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        self.check_same_dims(other)?;
        Ok(self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max))
    }

    /// Copy of the rectangle `[x0, x0 + w) x [y0, y0 + h)`.
    pub fn crop(&self, x0: usize, y0: usize, w: usize, h: usize) -> Result<Self> {
        if w == 0 || h == 0 || x0 + w > self.width || y0 + h > self.height {
            return Err(Error::Parameter(format!(
                "crop {w}x{h}+{x0}+{y0} outside {}x{}",
                self.width, self.height
            )));
        }
        Ok(Self::from_fn(w, h, |x, y| self.get(x0 + x, y0 + y)))
    }

    /// Order-sensitive 64-bit FNV-1a hash of the exact bit patterns.
    pub fn checksum(&self) -> u64 {
        let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
        for v in &self.data {
            for b in v.to_bits().to_le_bytes() {
                hash ^= b as u64;
                hash = hash.wrapping_mul(0x0100_0000_01b3);
            }
        }
        hash
    }
}

/// Runs `f` on every output row in parallel and assembles the image.
///
/// Each row is computed independently so the result does not depend on the
/// number of worker threads.
pub(crate) fn par_rows(
    width: usize,
    height: usize,
    f: impl Fn(usize, &mut [f64]) + Sync,
) -> Image2D {
    let mut data = vec![0.0; width * height];
    data.par_chunks_mut(width)
        .enumerate()
        .for_each(|(y, row)| f(y, row));
    Image2D {
        width,
        height,
        data,
    }
}

/// Rows `y - 1`, `y`, `y + 1` with replicate clamping at the borders.
#[inline]
pub(crate) fn row_triplet(img: &Image2D, y: usize) -> [&[f64]; 3] {
    let up = y.saturating_sub(1);
    let down = (y + 1).min(img.height - 1);
    [img.row(up), img.row(y), img.row(down)]
}

/// The clamped 3x3 neighbourhood around column `x`, indexed `[row][col]`.
#[inline]
pub(crate) fn neighborhood(rows: [&[f64]; 3], x: usize) -> [[f64; 3]; 3] {
    let w = rows[1].len();
    let l = x.saturating_sub(1);
    let r = (x + 1).min(w - 1);
    let mut n = [[0.0; 3]; 3];
    for (dst, src) in n.iter_mut().zip(rows) {
        *dst = [src[l], src[x], src[r]];
    }
    n
}

/// Interleaved 8-bit image with one (gray) or three (RGB) channels.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PixelBuffer {
    pub width: usize,
    pub height: usize,
    pub channels: usize,
    pub data: Vec<u8>,
}

impl PixelBuffer {
    pub fn new(width: usize, height: usize, channels: usize, data: Vec<u8>) -> Result<Self> {
        check_channel_count(channels)?;
        if width == 0 || height == 0 || data.len() != width * height * channels {
            return Err(Error::Format(format!(
                "buffer of {} bytes does not hold {width}x{height}x{channels}",
                data.len()
            )));
        }
        Ok(Self {
            width,
            height,
            channels,
            data,
        })
    }
}

fn check_channel_count(channels: usize) -> Result<()> {
    if channels == 1 || channels == 3 {
        Ok(())
    } else {
        Err(Error::Format(format!(
            "expected 1 or 3 channels, got {channels}"
        )))
    }
}

/// Splits an interleaved buffer into one [`Image2D`] per channel.
pub fn split_channels(buf: &PixelBuffer) -> Result<Vec<Image2D>> {
    check_channel_count(buf.channels)?;
    let n = buf.width * buf.height;
    if buf.data.len() != n * buf.channels {
        return Err(Error::Format("pixel buffer length mismatch".into()));
    }
    Ok((0..buf.channels)
        .map(|c| Image2D {
            width: buf.width,
            height: buf.height,
            data: (0..n)
                .map(|i| buf.data[i * buf.channels + c] as f64)
                .collect(),
        })
        .collect())
}

/// Interleaves channels back into 8-bit data, clamping to `[0, 255]` and rounding.
pub fn merge_channels(channels: &[Image2D]) -> Result<PixelBuffer> {
    check_channel_count(channels.len())?;
    let first = &channels[0];
    for c in &channels[1..] {
        first.check_same_dims(c)?;
    }
    let n = first.len();
    let mut data = Vec::with_capacity(n * channels.len());
    for i in 0..n {
        for c in channels {
            data.push(to_u8(c.data[i]));
        }
    }
    Ok(PixelBuffer {
        width: first.width,
        height: first.height,
        channels: channels.len(),
        data,
    })
}

#[inline]
pub fn to_u8(v: f64) -> u8 {
    if v.is_nan() {
        0
    } else {
        v.round().clamp(0.0, 255.0) as u8
    }
}

/// Applies `f` to each channel of `buf` independently and re-interleaves.
pub fn map_channels(
    buf: &PixelBuffer,
    mut f: impl FnMut(&Image2D) -> Result<Image2D>,
) -> Result<PixelBuffer> {
    let out = split_channels(buf)?
        .iter()
        .map(&mut f)
        .collect::<Result<Vec<_>>>()?;
    merge_channels(&out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_rgb_pixel_round_trip() {
        let buf = PixelBuffer::new(1, 1, 3, vec![10, 20, 30]).unwrap();
        let chans = split_channels(&buf).unwrap();
        assert_eq!(chans.len(), 3);
        assert_eq!(chans[0].get(0, 0), 10.0);
        assert_eq!(chans[1].get(0, 0), 20.0);
        assert_eq!(chans[2].get(0, 0), 30.0);
        assert_eq!(merge_channels(&chans).unwrap(), buf);
    }

    #[test]
    fn grayscale_splits_into_one_channel() {
        let buf = PixelBuffer::new(2, 1, 1, vec![0, 255]).unwrap();
        let chans = split_channels(&buf).unwrap();
        assert_eq!(chans.len(), 1);
        assert_eq!(chans[0].data(), &[0.0, 255.0]);
    }

    #[test]
    fn unsupported_channel_counts() {
        assert!(matches!(
            PixelBuffer::new(1, 1, 4, vec![0; 4]),
            Err(Error::Format(_))
        ));
        let two = vec![Image2D::zeros(1, 1), Image2D::zeros(1, 1)];
        assert!(matches!(merge_channels(&two), Err(Error::Format(_))));
    }

    #[test]
    fn merge_clamps_and_rounds() {
        let img = Image2D::from_vec(4, 1, vec![-3.0, 12.49, 12.5, 300.0]).unwrap();
        let buf = merge_channels(&[img]).unwrap();
        assert_eq!(buf.data, vec![0, 12, 13, 255]);
    }

    #[test]
    fn from_vec_validates_length() {
        assert!(Image2D::from_vec(2, 2, vec![0.0; 3]).is_err());
        assert!(Image2D::from_vec(0, 2, vec![]).is_err());
    }

    #[test]
    fn clamped_access_replicates_edges() {
        let img = Image2D::from_fn(3, 2, |x, y| (10 * y + x) as f64);
        assert_eq!(img.get_clamped(-5, 0), 0.0);
        assert_eq!(img.get_clamped(7, 9), 12.0);
    }
}
