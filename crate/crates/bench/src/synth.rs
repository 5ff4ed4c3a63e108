//! Seeded synthetic images with exact ground-truth masks.
//!
//! Every image is 256x256: one or two chromatically distinct objects
//! (flat colour plus mild noise) over a textured background.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use image::{GrayImage, Luma, Rgb, RgbImage};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use saliency_core::metrics::BinaryMask;
use saliency_core::pixelgrid::RasterImage;

use crate::dataset::DatasetEntry;
use crate::error::BenchError;

pub const SIZE: u32 = 256;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SynthKind {
    CenterObject,
    BoundaryObject,
    TwoObjects,
}

impl SynthKind {
    pub fn name(self) -> &'static str {
        match self {
            SynthKind::CenterObject => "center-object",
            SynthKind::BoundaryObject => "boundary-object",
            SynthKind::TwoObjects => "two-objects",
        }
    }
}

impl FromStr for SynthKind {
    type Err = BenchError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "center-object" => Ok(SynthKind::CenterObject),
            "boundary-object" => Ok(SynthKind::BoundaryObject),
            "two-objects" => Ok(SynthKind::TwoObjects),
            other => Err(BenchError::Config(format!("unknown synth kind `{other}`"))),
        }
    }
}

/// Axis-aligned ellipse, possibly extending past the frame.
#[derive(Debug, Clone, Copy)]
struct Ellipse {
    cx: f64,
    cy: f64,
    rx: f64,
    ry: f64,
}

impl Ellipse {
    fn contains(&self, x: f64, y: f64) -> bool {
        let dx = (x - self.cx) / self.rx;
        let dy = (y - self.cy) / self.ry;
        dx * dx + dy * dy <= 1.0
    }
}

fn hsv_to_rgb(h: f64, s: f64, v: f64) -> [f64; 3] {
    let c = v * s;
    let hp = (h.rem_euclid(360.0)) / 60.0;
    let x = c * (1.0 - (hp % 2.0 - 1.0).abs());
    let (r, g, b) = match hp as u32 {
        0 => (c, x, 0.0),
        1 => (x, c, 0.0),
        2 => (0.0, c, x),
        3 => (0.0, x, c),
        4 => (x, 0.0, c),
        _ => (c, 0.0, x),
    };
    let m = v - c;
    [(r + m) * 255.0, (g + m) * 255.0, (b + m) * 255.0]
}

/// A generated image and its mask.
pub struct Sample {
    pub image: RgbImage,
    pub mask: GrayImage,
}

impl Sample {
    pub fn raster(&self) -> RasterImage {
        RasterImage::from_rgb8(SIZE as usize, SIZE as usize, self.image.as_raw())
            .expect("synthetic images are valid")
    }

    pub fn truth(&self) -> BinaryMask {
        let bits = self.mask.as_raw().iter().map(|&v| v > 127).collect();
        BinaryMask::new(SIZE as usize, SIZE as usize, bits).expect("mask matches image")
    }
}

pub fn generate(kind: SynthKind, seed: u64) -> Sample {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5a17_3e55);
    let size = f64::from(SIZE);

    // Muted background, saturated object on the opposite side of the hue wheel.
    let bg_hue = rng.random_range(0.0..360.0);
    let bg = hsv_to_rgb(bg_hue, rng.random_range(0.15..0.35), rng.random_range(0.45..0.7));
    let fg_hue = bg_hue + rng.random_range(120.0..240.0);
    let fg = hsv_to_rgb(fg_hue, rng.random_range(0.6..0.9), rng.random_range(0.7..0.95));

    // Background texture: a few oriented sinusoids.
    let waves: Vec<(f64, f64, f64, f64)> = (0..3)
        .map(|_| {
            let angle = rng.random_range(0.0..PI);
            let period = rng.random_range(6.0..24.0);
            let phase = rng.random_range(0.0..2.0 * PI);
            let amp = rng.random_range(4.0..9.0);
            (angle, period, phase, amp)
        })
        .collect();

    let objects = match kind {
        SynthKind::CenterObject => vec![Ellipse {
            cx: size / 2.0 + rng.random_range(-16.0..16.0),
            cy: size / 2.0 + rng.random_range(-16.0..16.0),
            rx: rng.random_range(36.0..60.0),
            ry: rng.random_range(36.0..60.0),
        }],
        SynthKind::BoundaryObject => {
            let rx = rng.random_range(36.0..56.0);
            let ry = rng.random_range(36.0..56.0);
            // Centre 10 px inside the chosen border; the other three stay clear.
            let along = size / 2.0 + rng.random_range(-24.0..24.0);
            let e = match rng.random_range(0..4) {
                0 => Ellipse { cx: along, cy: 10.0, rx, ry },
                1 => Ellipse { cx: along, cy: size - 11.0, rx, ry },
                2 => Ellipse { cx: 10.0, cy: along, rx, ry },
                _ => Ellipse { cx: size - 11.0, cy: along, rx, ry },
            };
            vec![e]
        }
        SynthKind::TwoObjects => {
            let r1 = rng.random_range(26.0..38.0);
            let r2 = rng.random_range(26.0..38.0);
            let dy = rng.random_range(-20.0..20.0);
            vec![
                Ellipse { cx: size * 0.3, cy: size / 2.0 + dy, rx: r1, ry: r1 * 1.2 },
                Ellipse { cx: size * 0.7, cy: size / 2.0 - dy, rx: r2 * 1.1, ry: r2 },
            ]
        }
    };

    let mut image = RgbImage::new(SIZE, SIZE);
    let mut mask = GrayImage::new(SIZE, SIZE);
    for y in 0..SIZE {
        for x in 0..SIZE {
            let (fx, fy) = (f64::from(x), f64::from(y));
            let inside = objects.iter().any(|e| e.contains(fx, fy));
            let px = if inside {
                fg.map(|c| c + rng.random_range(-4.0..4.0))
            } else {
                let t: f64 = waves
                    .iter()
                    .map(|&(a, period, phase, amp)| {
                        let u = fx * a.cos() + fy * a.sin();
                        amp * (2.0 * PI * u / period + phase).sin()
                    })
                    .sum();
                bg.map(|c| c + t + rng.random_range(-3.0..3.0))
            };
            image.put_pixel(x, y, Rgb(px.map(|c| c.round().clamp(0.0, 255.0) as u8)));
            mask.put_pixel(x, y, Luma([if inside { 255 } else { 0 }]));
        }
    }
    Sample { image, mask }
}

/// Writes `count` samples (seeds `seed..seed + count`) as
/// `images/<kind>_<seed>.png` and `masks/<kind>_<seed>.png` under `out`.
pub fn write(kind: SynthKind, seed: u64, count: u64, out: &Path) -> Result<Vec<DatasetEntry>, BenchError> {
    let images = out.join("images");
    let masks = out.join("masks");
    std::fs::create_dir_all(&images)?;
    std::fs::create_dir_all(&masks)?;
    let mut entries = Vec::new();
    for s in seed..seed + count {
        let sample = generate(kind, s);
        let stem = format!("{}_{s}", kind.name());
        let image_path: PathBuf = images.join(format!("{stem}.png"));
        let mask_path: PathBuf = masks.join(format!("{stem}.png"));
        sample.image.save(&image_path)?;
        sample.mask.save(&mask_path)?;
        entries.push(DatasetEntry {
            image: image_path,
            mask: Some(mask_path),
        });
    }
    Ok(entries)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bbox(mask: &GrayImage) -> (u32, u32, u32, u32) {
        let mut b = (u32::MAX, u32::MAX, 0, 0);
        for (x, y, p) in mask.enumerate_pixels() {
            if p[0] > 0 {
                b = (b.0.min(x), b.1.min(y), b.2.max(x), b.3.max(y));
            }
        }
        b
    }

    #[test]
    fn boundary_object_touches_exactly_one_border() {
        for seed in 0..20 {
            let s = generate(SynthKind::BoundaryObject, seed);
            let (x0, y0, x1, y1) = bbox(&s.mask);
            let touching = [y0 == 0, y1 == SIZE - 1, x0 == 0, x1 == SIZE - 1];
            assert_eq!(touching.iter().filter(|&&t| t).count(), 1, "seed {seed}");
        }
    }

    #[test]
    fn center_object_stays_interior() {
        for seed in 0..20 {
            let (x0, y0, x1, y1) = bbox(&generate(SynthKind::CenterObject, seed).mask);
            assert!(x0 > 0 && y0 > 0 && x1 < SIZE - 1 && y1 < SIZE - 1);
        }
    }

    #[test]
    fn same_seed_same_pixels() {
        let a = generate(SynthKind::TwoObjects, 7);
        let b = generate(SynthKind::TwoObjects, 7);
        assert_eq!(a.image.as_raw(), b.image.as_raw());
        assert_eq!(a.mask.as_raw(), b.mask.as_raw());
        assert_ne!(a.image.as_raw(), generate(SynthKind::TwoObjects, 8).image.as_raw());
    }
}
