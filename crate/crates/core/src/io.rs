//! PGM (P2/P5), PPM and PNG load/save for 8-bit gray and RGB images.
//!
//! Decoding and encoding go through the `image` crate. Only 8-bit gray
//! and 8-bit RGB layouts are accepted; anything else is a format error.

use std::path::Path;

use image::codecs::pnm::{PnmEncoder, PnmSubtype, SampleEncoding};
use image::{DynamicImage, ExtendedColorType, ImageEncoder, ImageFormat, ImageReader};

use crate::error::{Error, Result};
use crate::image::{merge_channels, split_channels, Image2D, PixelBuffer};

pub fn load(path: impl AsRef<Path>) -> Result<PixelBuffer> {
    let path = path.as_ref();
    let decoded = ImageReader::open(path)?.with_guessed_format()?.decode()?;
    let (width, height) = (decoded.width() as usize, decoded.height() as usize);
    match decoded {
        DynamicImage::ImageLuma8(buf) => PixelBuffer::new(width, height, 1, buf.into_raw()),
        DynamicImage::ImageRgb8(buf) => PixelBuffer::new(width, height, 3, buf.into_raw()),
        other => Err(Error::Format(format!(
            "{}: unsupported pixel layout {:?} (need 8-bit gray or RGB)",
            path.display(),
            other.color()
        ))),
    }
}

/// Writes `buf`, choosing the encoding from the file extension.
///
/// `.pgm` produces binary P5 with maxval 255 and only accepts one channel.
pub fn save(path: impl AsRef<Path>, buf: &PixelBuffer) -> Result<()> {
    let path = path.as_ref();
    let format = ImageFormat::from_path(path)?;
    let color = match buf.channels {
        1 => ExtendedColorType::L8,
        3 => ExtendedColorType::Rgb8,
        n => return Err(Error::Format(format!("cannot save {n} channels"))),
    };
    let is_pgm = path
        .extension()
        .and_then(|e| e.to_str())
        .is_some_and(|e| e.eq_ignore_ascii_case("pgm"));
    if is_pgm && buf.channels != 1 {
        return Err(Error::Format(format!(
            "{}: PGM holds a single channel; use .ppm or .png for RGB",
            path.display()
        )));
    }
    let (w, h) = (buf.width as u32, buf.height as u32);
    if format == ImageFormat::Pnm {
        let subtype = if buf.channels == 1 {
            PnmSubtype::Graymap(SampleEncoding::Binary)
        } else {
            PnmSubtype::Pixmap(SampleEncoding::Binary)
        };
        let file = std::io::BufWriter::new(std::fs::File::create(path)?);
        PnmEncoder::new(file)
            .with_subtype(subtype)
            .write_image(&buf.data, w, h, color)?;
    } else {
        image::save_buffer_with_format(path, &buf.data, w, h, color, format)?;
    }
    Ok(())
}

/// Loads an image as one [`Image2D`] per channel.
pub fn load_channels(path: impl AsRef<Path>) -> Result<Vec<Image2D>> {
    split_channels(&load(path)?)
}

/// Loads a single-channel image; RGB input is rejected.
pub fn load_gray(path: impl AsRef<Path>) -> Result<Image2D> {
    let path = path.as_ref();
    let mut chans = load_channels(path)?;
    if chans.len() != 1 {
        return Err(Error::Format(format!(
            "{}: expected a grayscale image",
            path.display()
        )));
    }
    Ok(chans.remove(0))
}

/// Clamps, rounds and writes per-channel images.
pub fn save_channels(path: impl AsRef<Path>, channels: &[Image2D]) -> Result<()> {
    save(path, &merge_channels(channels)?)
}

pub fn save_gray(path: impl AsRef<Path>, img: &Image2D) -> Result<()> {
    save_channels(path, std::slice::from_ref(img))
}

/// Paths of the loadable image files directly inside `dir`, sorted by name.
pub fn list_images(dir: impl AsRef<Path>) -> Result<Vec<std::path::PathBuf>> {
    let mut out = Vec::new();
    for entry in std::fs::read_dir(dir.as_ref())? {
        let path = entry?.path();
        if !path.is_file() {
            continue;
        }
        let ext = path
            .extension()
            .and_then(|e| e.to_str())
            .map(|e| e.to_ascii_lowercase());
        if matches!(ext.as_deref(), Some("png" | "pgm" | "ppm" | "pnm")) {
            out.push(path);
        }
    }
    out.sort();
    Ok(out)
}
