//! Image and map files.

use std::io::BufReader;
use std::path::Path;

use image::{GrayImage, ImageFormat, ImageReader, Luma};
use saliency_core::metrics::{quantize, BinaryMask};
use saliency_core::pixelgrid::RasterImage;

use crate::error::BenchError;

fn open_image(path: &Path) -> Result<image::DynamicImage, BenchError> {
    let unreadable = |reason: String| BenchError::UnreadableFile {
        path: path.to_path_buf(),
        reason,
    };
    let file = std::fs::File::open(path).map_err(|e| unreadable(e.to_string()))?;
    let reader = ImageReader::new(BufReader::new(file))
        .with_guessed_format()
        .map_err(|e| unreadable(e.to_string()))?;
    match reader.format() {
        Some(ImageFormat::Png | ImageFormat::Jpeg) => {}
        Some(_) => return Err(BenchError::UnsupportedFormat(path.to_path_buf())),
        None => {
            // Unknown magic: a mangled file with a supported extension is
            // unreadable, anything else is unsupported.
            let ext = path
                .extension()
                .and_then(|e| e.to_str())
                .map(str::to_ascii_lowercase);
            return match ext.as_deref() {
                Some("png" | "jpg" | "jpeg") => Err(unreadable("unrecognised image data".into())),
                _ => Err(BenchError::UnsupportedFormat(path.to_path_buf())),
            };
        }
    }
    reader.decode().map_err(|e| unreadable(e.to_string()))
}

/// Decodes an 8-bit sRGB PNG or JPEG.
pub fn load_image(path: &Path) -> Result<RasterImage, BenchError> {
    let rgb = open_image(path)?.to_rgb8();
    let (w, h) = (rgb.width() as usize, rgb.height() as usize);
    RasterImage::from_rgb8(w, h, rgb.as_raw()).map_err(|e| match e {
        saliency_core::Error::ImageTooSmall { width, height } => BenchError::ImageTooSmall {
            path: path.to_path_buf(),
            width,
            height,
        },
        other => other.into(),
    })
}

/// Reads a ground-truth mask; pixels brighter than mid-grey are foreground.
pub fn load_mask(path: &Path) -> Result<BinaryMask, BenchError> {
    let gray = open_image(path)?.to_luma8();
    let bits = gray.pixels().map(|p| p[0] > 127).collect();
    Ok(BinaryMask::new(
        gray.width() as usize,
        gray.height() as usize,
        bits,
    )?)
}

/// Reads an 8-bit grayscale map back into `[0, 1]`.
pub fn load_map(path: &Path) -> Result<(usize, usize, Vec<f64>), BenchError> {
    let gray = open_image(path)?.to_luma8();
    let values = gray.pixels().map(|p| f64::from(p[0]) / 255.0).collect();
    Ok((gray.width() as usize, gray.height() as usize, values))
}

/// Writes a `[0, 1]` pixel map as an 8-bit grayscale PNG.
pub fn save_map(path: &Path, width: usize, height: usize, pixels: &[f64]) -> Result<(), BenchError> {
    let bytes = quantize(pixels);
    let img = GrayImage::from_raw(width as u32, height as u32, bytes)
        .expect("buffer matches dimensions");
    img.save_with_format(path, ImageFormat::Png)?;
    Ok(())
}

pub fn save_mask(path: &Path, mask: &BinaryMask) -> Result<(), BenchError> {
    let mut img = GrayImage::new(mask.width() as u32, mask.height() as u32);
    for (p, &b) in img.pixels_mut().zip(mask.bits()) {
        *p = Luma([if b { 255 } else { 0 }]);
    }
    img.save_with_format(path, ImageFormat::Png)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use image::{Rgb, RgbImage};

    #[test]
    fn png_round_trip_dimensions() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("a.png");
        RgbImage::from_pixel(400, 300, Rgb([10, 20, 30])).save(&path).unwrap();
        let img = load_image(&path).unwrap();
        assert_eq!((img.width(), img.height()), (400, 300));
        assert_eq!(img.pixel(5, 5), [10.0, 20.0, 30.0]);
    }

    #[test]
    fn jpeg_is_accepted() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("a.jpg");
        RgbImage::from_pixel(32, 24, Rgb([200, 20, 30])).save(&path).unwrap();
        let img = load_image(&path).unwrap();
        assert_eq!((img.width(), img.height()), (32, 24));
    }

    #[test]
    fn tiny_image_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("tiny.png");
        RgbImage::new(8, 8).save(&path).unwrap();
        assert!(matches!(load_image(&path), Err(BenchError::ImageTooSmall { .. })));
    }

    #[test]
    fn truncated_file_is_unreadable() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cut.png");
        RgbImage::from_pixel(64, 64, Rgb([1, 2, 3])).save(&path).unwrap();
        let bytes = std::fs::read(&path).unwrap();
        std::fs::write(&path, &bytes[..bytes.len() / 3]).unwrap();
        assert!(matches!(load_image(&path), Err(BenchError::UnreadableFile { .. })));
        assert!(matches!(
            load_image(&dir.path().join("missing.png")),
            Err(BenchError::UnreadableFile { .. })
        ));
    }

    #[test]
    fn other_formats_unsupported() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("a.bmp");
        std::fs::write(&path, b"BM\0\0\0\0\0\0\0\0").unwrap();
        assert!(matches!(load_image(&path), Err(BenchError::UnsupportedFormat(_))));
    }
}
