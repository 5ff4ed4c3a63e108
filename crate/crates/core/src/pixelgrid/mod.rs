//! Raster images, pre-smoothing, CIELAB conversion and SLIC superpixels.

mod lab;
mod slic;
mod smooth;

use alloc::vec::Vec;

use crate::{Error, Result};

pub use self::lab::{srgb_to_lab, to_lab, Lab, LabImage};
pub use self::slic::{slic, SlicParams, SuperpixelMap};
pub use self::smooth::{smooth, Smoother};

/// Smallest accepted side length, in pixels.
pub const MIN_SIDE: usize = 16;

/// An sRGB image with real-valued channels in `[0, 255]`, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct RasterImage {
    width: usize,
    height: usize,
    pixels: Vec<[f64; 3]>,
}

impl RasterImage {
    pub fn new(width: usize, height: usize, pixels: Vec<[f64; 3]>) -> Result<Self> {
        if width < MIN_SIDE || height < MIN_SIDE {
            return Err(Error::ImageTooSmall { width, height });
        }
        if pixels.len() != width * height {
            return Err(Error::DimensionMismatch {
                expected: width * height,
                actual: pixels.len(),
            });
        }
        if pixels
            .iter()
            .flatten()
            .any(|c| !(0.0..=255.0).contains(c))
        {
            return Err(Error::InvalidImage("channel value outside [0, 255]"));
        }
        Ok(Self {
            width,
            height,
            pixels,
        })
    }

    /// Builds an image from interleaved 8-bit RGB bytes.
    pub fn from_rgb8(width: usize, height: usize, bytes: &[u8]) -> Result<Self> {
        if bytes.len() != width * height * 3 {
            return Err(Error::DimensionMismatch {
                expected: width * height * 3,
                actual: bytes.len(),
            });
        }
        let pixels = bytes
            .chunks_exact(3)
            .map(|p| [f64::from(p[0]), f64::from(p[1]), f64::from(p[2])])
            .collect();
        Self::new(width, height, pixels)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn pixels(&self) -> &[[f64; 3]] {
        &self.pixels
    }

    pub fn pixel(&self, x: usize, y: usize) -> [f64; 3] {
        self.pixels[y * self.width + x]
    }

    /// Interleaved 8-bit RGB, rounding each channel.
    pub fn to_rgb8(&self) -> Vec<u8> {
        self.pixels
            .iter()
            .flat_map(|p| p.map(|c| libm::round(c).clamp(0.0, 255.0) as u8))
            .collect()
    }
}
