//! Edge-preserving pre-smoothing.
//!
//! A small stand-in for L0 gradient minimisation: each pass drops every
//! neighbour difference whose squared colour magnitude (channels scaled to
//! `[0, 1]`) falls below `strength`, then rebuilds each pixel as the mean of
//! itself and the neighbours it is still connected to. Strong edges never
//! enter the average, so they survive untouched while low-amplitude texture
//! is flattened.

use alloc::vec::Vec;

use super::RasterImage;

const PASSES: usize = 4;

/// Pre-smoothing mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Smoother {
    None,
    #[default]
    L0Approx,
}

impl Smoother {
    pub fn apply(self, img: &RasterImage, strength: f64) -> RasterImage {
        match self {
            Smoother::None => img.clone(),
            Smoother::L0Approx => smooth(img, strength),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Smoother::None => "none",
            Smoother::L0Approx => "l0-approx",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "none" => Some(Smoother::None),
            "l0-approx" => Some(Smoother::L0Approx),
            _ => None,
        }
    }
}

fn sq_dist(a: [f64; 3], b: [f64; 3]) -> f64 {
    (0..3).map(|c| (a[c] - b[c]) * (a[c] - b[c])).sum()
}

pub fn smooth(img: &RasterImage, strength: f64) -> RasterImage {
    if strength <= 0.0 {
        return img.clone();
    }
    let (w, h) = (img.width(), img.height());
    let mut cur: Vec<[f64; 3]> = img
        .pixels()
        .iter()
        .map(|p| p.map(|c| c / 255.0))
        .collect();
    let mut next = cur.clone();

    for _ in 0..PASSES {
        for y in 0..h {
            for x in 0..w {
                let i = y * w + x;
                let centre = cur[i];
                let mut acc = centre;
                let mut count = 1.0;
                let mut visit = |j: usize| {
                    let q = cur[j];
                    if sq_dist(centre, q) < strength {
                        for c in 0..3 {
                            acc[c] += q[c];
                        }
                        count += 1.0;
                    }
                };
                if x > 0 {
                    visit(i - 1);
                }
                if x + 1 < w {
                    visit(i + 1);
                }
                if y > 0 {
                    visit(i - w);
                }
                if y + 1 < h {
                    visit(i + w);
                }
                next[i] = acc.map(|c| c / count);
            }
        }
        core::mem::swap(&mut cur, &mut next);
    }

    let pixels = cur
        .into_iter()
        .map(|p| p.map(|c| (c * 255.0).clamp(0.0, 255.0)))
        .collect();
    RasterImage::new(w, h, pixels).expect("dimensions preserved")
}
