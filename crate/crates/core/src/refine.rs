//! Two-stage refinement: a centre-anchored Gaussian decrease followed by a
//! cluster-wise highlight, repeated until the map settles.

use alloc::vec;
use alloc::vec::Vec;

use crate::features::{feature_distance, DistanceParams, RegionDescriptor};
use crate::graph::{edge_weight, AffinityGraph, GraphParams};
use crate::kmeans::kmeans;
use crate::map::{SaliencyMap, Stage};
use crate::pixelgrid::SuperpixelMap;
use crate::ranking::normalize;
use crate::{Error, Result};

const KMEANS_MAX_ITERS: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecreaseParams {
    pub sigma_x: f64,
    pub sigma_y: f64,
    pub center: (f64, f64),
}

impl DecreaseParams {
    /// `sigma = half the image side`, centred on the image.
    pub fn for_image(width: usize, height: usize) -> Self {
        let (w, h) = (width as f64, height as f64);
        Self {
            sigma_x: 0.5 * w,
            sigma_y: 0.5 * h,
            center: (w / 2.0, h / 2.0),
        }
    }

    pub fn falloff(&self, x: f64, y: f64) -> f64 {
        let dx = x - self.center.0;
        let dy = y - self.center.1;
        libm::exp(
            -(dx * dx / (2.0 * self.sigma_x * self.sigma_x)
                + dy * dy / (2.0 * self.sigma_y * self.sigma_y)),
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HighlightParams {
    pub gamma1: f64,
    pub gamma2: f64,
    pub k_clusters: usize,
    pub kmeans_seed: u64,
}

impl Default for HighlightParams {
    fn default() -> Self {
        Self {
            gamma1: 0.5,
            gamma2: 0.5,
            k_clusters: 8,
            kmeans_seed: 0,
        }
    }
}

impl HighlightParams {
    pub fn validate(&self) -> Result<()> {
        if self.gamma1 < 0.0 || self.gamma2 < 0.0 || !(self.gamma1 + self.gamma2 > 0.0) {
            return Err(Error::InvalidParameter(
                "gamma1 and gamma2 must be non-negative with a positive sum",
            ));
        }
        if self.k_clusters == 0 {
            return Err(Error::InvalidParameter("k_clusters must be at least 1"));
        }
        Ok(())
    }
}

/// The feature affinity `exp(-dist / (unit * sigma2))` shared with the graph.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeatureKernel {
    pub distance: DistanceParams,
    pub sigma2: f64,
    pub unit: f64,
}

impl FeatureKernel {
    pub fn from_graph(g: &AffinityGraph, p: &GraphParams) -> Self {
        Self {
            distance: p.distance,
            sigma2: p.sigma2,
            unit: g.distance_unit(),
        }
    }

    pub fn weight(&self, a: &RegionDescriptor, b: &RegionDescriptor) -> Result<f64> {
        Ok(edge_weight(
            feature_distance(a, b, &self.distance)? / self.unit,
            self.sigma2,
        ))
    }
}

/// Pixel map `S(x, y) = S_fbm(x, y) * G(x, y)`, before any rescaling.
pub fn decrease_pixels(map: &SaliencyMap, sp: &SuperpixelMap, p: &DecreaseParams) -> Vec<f64> {
    let w = sp.width();
    sp.labels()
        .iter()
        .enumerate()
        .map(|(i, &l)| map.scores[l as usize] * p.falloff((i % w) as f64, (i / w) as f64))
        .collect()
}

/// Region means of [`decrease_pixels`], rescaled to `[0, 1]`.
pub fn decrease(map: &SaliencyMap, sp: &SuperpixelMap, p: &DecreaseParams) -> Result<SaliencyMap> {
    if map.region_count() != sp.region_count() {
        return Err(Error::DimensionMismatch {
            expected: sp.region_count(),
            actual: map.region_count(),
        });
    }
    let pixels = decrease_pixels(map, sp, p);
    Ok(SaliencyMap::new(
        normalize(&region_means(&pixels, sp)),
        Stage::Decreased,
        map.width,
        map.height,
    ))
}

/// Average pixel value of every region.
pub fn region_means(pixels: &[f64], sp: &SuperpixelMap) -> Vec<f64> {
    let mut sums = vec![0.0; sp.region_count()];
    for (&v, &l) in pixels.iter().zip(sp.labels()) {
        sums[l as usize] += v;
    }
    sums.iter()
        .zip(sp.pixel_counts())
        .map(|(s, &n)| s / n as f64)
        .collect()
}

/// Shares saliency inside appearance clusters:
/// `S(i) = g1 S1(i) + g2 sum_j w_ij S1(j) / sum_j w_ij` over the members `j`
/// of `i`'s cluster (including `i` itself).
pub fn highlight(
    dec: &SaliencyMap,
    descriptors: &[RegionDescriptor],
    p: &HighlightParams,
    kernel: &FeatureKernel,
) -> Result<SaliencyMap> {
    p.validate()?;
    let n = dec.region_count();
    if descriptors.len() != n {
        return Err(Error::IndexMismatch {
            regions: n,
            descriptors: descriptors.len(),
        });
    }
    if p.k_clusters > n {
        return Err(Error::ClusterCountTooLarge {
            k: p.k_clusters,
            regions: n,
        });
    }
    let a1 = kernel.distance.alpha1;
    let a2 = kernel.distance.alpha2;
    let points: Vec<Vec<f64>> = descriptors
        .iter()
        .map(|d| {
            d.lab_mean
                .iter()
                .map(|v| a1 * v)
                .chain(d.hog.iter().map(|v| a2 * v))
                .collect()
        })
        .collect();
    let clusters = kmeans(&points, p.k_clusters, p.kmeans_seed, KMEANS_MAX_ITERS)?;

    let mut members: Vec<Vec<usize>> = vec![Vec::new(); p.k_clusters];
    for (i, &c) in clusters.assignments.iter().enumerate() {
        members[c].push(i);
    }
    let s1 = &dec.scores;
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut num = 0.0;
        let mut den = 0.0;
        for &j in &members[clusters.assignments[i]] {
            let w = if i == j {
                1.0
            } else {
                kernel.weight(&descriptors[i], &descriptors[j])?
            };
            num += w * s1[j];
            den += w;
        }
        out.push(p.gamma1 * s1[i] + p.gamma2 * num / den);
    }
    Ok(SaliencyMap::new(normalize(&out), Stage::Final, dec.width, dec.height))
}

/// Everything produced by [`refine_pipeline`].
#[derive(Debug, Clone, PartialEq)]
pub struct Refined {
    /// Decrease stage of the first pass, applied to the foreground map.
    pub decreased: SaliencyMap,
    /// Its pixel map before region averaging and rescaling.
    pub decreased_pixels: Vec<f64>,
    pub final_map: SaliencyMap,
    pub iterations: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RefineParams {
    pub highlight: HighlightParams,
    pub max_iters: usize,
    pub tolerance: f64,
}

impl Default for RefineParams {
    fn default() -> Self {
        Self {
            highlight: HighlightParams::default(),
            max_iters: 3,
            tolerance: 1e-3,
        }
    }
}

/// Runs decrease + highlight up to `max_iters` times, stopping once no
/// region moves by `tolerance` or more.
pub fn refine_pipeline(
    fbm: &SaliencyMap,
    sp: &SuperpixelMap,
    descriptors: &[RegionDescriptor],
    params: &RefineParams,
    kernel: &FeatureKernel,
) -> Result<Refined> {
    let dp = DecreaseParams::for_image(sp.width(), sp.height());
    let first_pixels = decrease_pixels(fbm, sp, &dp);
    let first_dec = decrease(fbm, sp, &dp)?;

    let mut current = fbm.clone();
    let mut iterations = 0;
    for _ in 0..params.max_iters {
        let dec = if iterations == 0 {
            first_dec.clone()
        } else {
            decrease(&current, sp, &dp)?
        };
        let next = highlight(&dec, descriptors, &params.highlight, kernel)?;
        iterations += 1;
        let change = next
            .scores
            .iter()
            .zip(&current.scores)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        current = next;
        if change < params.tolerance {
            break;
        }
    }
    Ok(Refined {
        decreased: first_dec,
        decreased_pixels: first_pixels,
        final_map: current.with_stage(Stage::Final),
        iterations,
    })
}
