//! Per-region colour and gradient-orientation descriptors, and the mixed
//! feature distance used for edge weights and clustering.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::pixelgrid::{Lab, LabImage, SuperpixelMap};
use crate::{Error, Result};

/// Unsigned orientation bins over `[0, pi)`.
pub const HOG_BINS: usize = 9;

#[derive(Debug, Clone, PartialEq)]
pub struct RegionDescriptor {
    pub region_index: usize,
    pub lab_mean: Lab,
    /// L1-normalised orientation histogram, all-zero for flat regions.
    pub hog: Vec<f64>,
}

/// Weights of the colour and texture terms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DistanceParams {
    pub alpha1: f64,
    pub alpha2: f64,
}

impl Default for DistanceParams {
    fn default() -> Self {
        Self {
            alpha1: 0.6,
            alpha2: 0.4,
        }
    }
}

impl DistanceParams {
    pub fn validate(&self) -> Result<()> {
        if self.alpha1 < 0.0 || self.alpha2 < 0.0 || !(self.alpha1 + self.alpha2).is_finite() {
            return Err(Error::InvalidParameter("alpha1 and alpha2 must be non-negative"));
        }
        Ok(())
    }
}

fn orientation_bin(gx: f64, gy: f64) -> usize {
    let width = PI / HOG_BINS as f64;
    let mut theta = libm::atan2(gy, gx);
    if theta < 0.0 {
        theta += PI;
    }
    // Bins are centred on multiples of `width`, so bin 0 straddles 0 / pi.
    (libm::floor(theta / width + 0.5) as usize) % HOG_BINS
}

/// Computes one descriptor per superpixel. Gradients come from central
/// differences of the lightness channel, clamped at the image border.
pub fn extract_descriptors(lab: &LabImage, sp: &SuperpixelMap) -> Result<Vec<RegionDescriptor>> {
    let (w, h) = (lab.width(), lab.height());
    if (sp.width(), sp.height()) != (w, h) {
        return Err(Error::DimensionMismatch {
            expected: w * h,
            actual: sp.width() * sp.height(),
        });
    }
    let r = sp.region_count();
    let light = lab.lightness();
    let mut sums = vec![[0.0f64; 3]; r];
    let mut hist = vec![vec![0.0f64; HOG_BINS]; r];

    for y in 0..h {
        for x in 0..w {
            let i = y * w + x;
            let region = sp.labels()[i] as usize;
            let p = lab.pixels()[i];
            for c in 0..3 {
                sums[region][c] += p[c];
            }
            let gx = (light[y * w + (x + 1).min(w - 1)] - light[y * w + x.saturating_sub(1)]) / 2.0;
            let gy = (light[(y + 1).min(h - 1) * w + x] - light[y.saturating_sub(1) * w + x]) / 2.0;
            let mag = libm::hypot(gx, gy);
            if mag > 1e-12 {
                hist[region][orientation_bin(gx, gy)] += mag;
            }
        }
    }

    Ok((0..r)
        .map(|region| {
            let n = sp.pixel_counts()[region] as f64;
            let mut hog = core::mem::take(&mut hist[region]);
            let total: f64 = hog.iter().sum();
            if total > 0.0 {
                hog.iter_mut().for_each(|v| *v /= total);
            }
            RegionDescriptor {
                region_index: region,
                lab_mean: sums[region].map(|s| s / n),
                hog,
            }
        })
        .collect())
}

/// Chi-squared histogram distance, `sum 2 (a - b)^2 / (a + b)`; bins with a
/// zero denominator contribute nothing.
pub fn chi_square(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::BinCountMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    Ok(a.iter()
        .zip(b)
        .map(|(&x, &y)| {
            let s = x + y;
            if s > 0.0 {
                2.0 * (x - y) * (x - y) / s
            } else {
                0.0
            }
        })
        .sum())
}

pub fn lab_distance(a: Lab, b: Lab) -> f64 {
    libm::sqrt((0..3).map(|c| (a[c] - b[c]) * (a[c] - b[c])).sum())
}

/// `alpha1 * |lab_a - lab_b| + alpha2 * chi2(hog_a, hog_b)`.
pub fn feature_distance(
    a: &RegionDescriptor,
    b: &RegionDescriptor,
    p: &DistanceParams,
) -> Result<f64> {
    Ok(p.alpha1 * lab_distance(a.lab_mean, b.lab_mean) + p.alpha2 * chi_square(&a.hog, &b.hog)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pixelgrid::{srgb_to_lab, to_lab, RasterImage};

    fn descriptor(lab: Lab, hog: Vec<f64>) -> RegionDescriptor {
        RegionDescriptor {
            region_index: 0,
            lab_mean: lab,
            hog,
        }
    }

    #[test]
    fn chi_square_examples() {
        assert_eq!(chi_square(&[1.0, 0.0], &[0.0, 1.0]).unwrap(), 4.0);
        assert_eq!(chi_square(&[0.5, 0.5], &[0.5, 0.5]).unwrap(), 0.0);
        assert_eq!(chi_square(&[0.0; 9], &[0.0; 9]).unwrap(), 0.0);
        assert!(matches!(
            chi_square(&[1.0], &[0.5, 0.5]),
            Err(Error::BinCountMismatch { left: 1, right: 2 })
        ));
    }

    #[test]
    fn distance_examples() {
        let p = DistanceParams::default();
        let h = vec![1.0, 0.0];
        let a = descriptor([10.0, 0.0, 0.0], h.clone());
        assert_eq!(feature_distance(&a, &a, &p).unwrap(), 0.0);
        let b = descriptor([11.0, 0.0, 0.0], h);
        assert!((feature_distance(&a, &b, &p).unwrap() - 0.6).abs() < 1e-12);
        let c = descriptor([11.0, 0.0, 0.0], vec![0.0, 1.0]);
        assert!((feature_distance(&a, &c, &p).unwrap() - 2.2).abs() < 1e-12);
    }

    #[test]
    fn uniform_gray_has_identical_means_and_empty_hog() {
        let img = RasterImage::new(32, 32, vec![[128.0; 3]; 32 * 32]).unwrap();
        let lab = to_lab(&img);
        let labels = (0..32 * 32).map(|i| ((i % 32) / 16) as u32).collect();
        let sp = SuperpixelMap::from_labels(32, 32, labels).unwrap();
        let d = extract_descriptors(&lab, &sp).unwrap();
        assert_eq!(d.len(), 2);
        assert_eq!(d[0].lab_mean, d[1].lab_mean);
        assert!(d.iter().all(|r| r.hog.iter().all(|&v| v == 0.0)));
    }

    #[test]
    fn black_white_split_differs_by_full_lightness() {
        let px = (0..32 * 32)
            .map(|i| if i % 32 < 16 { [0.0; 3] } else { [255.0; 3] })
            .collect();
        let lab = to_lab(&RasterImage::new(32, 32, px).unwrap());
        let labels = (0..32 * 32).map(|i| ((i % 32) / 16) as u32).collect();
        let sp = SuperpixelMap::from_labels(32, 32, labels).unwrap();
        let d = extract_descriptors(&lab, &sp).unwrap();
        let expected = srgb_to_lab([255.0; 3])[0] - srgb_to_lab([0.0; 3])[0];
        assert!((d[1].lab_mean[0] - d[0].lab_mean[0] - expected).abs() < 1e-9);
        assert!((expected - 100.0).abs() < 1e-4);
    }

    #[test]
    fn vertical_stripes_vote_horizontal_bin() {
        let px = (0..32 * 32)
            .map(|i| if (i % 32) / 3 % 2 == 0 { [30.0; 3] } else { [200.0; 3] })
            .collect();
        let lab = to_lab(&RasterImage::new(32, 32, px).unwrap());
        let sp = SuperpixelMap::from_labels(32, 32, vec![0; 32 * 32]).unwrap();
        let d = extract_descriptors(&lab, &sp).unwrap();
        let hog = &d[0].hog;
        assert!((hog.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        assert!(hog[0] > 0.99, "{hog:?}");
    }
}
