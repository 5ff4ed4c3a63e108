use std::collections::VecDeque;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use saliency_core::features::{
    chi_square, extract_descriptors, feature_distance, DistanceParams, RegionDescriptor, HOG_BINS,
};
use saliency_core::pixelgrid::{slic, to_lab, RasterImage, SlicParams, SuperpixelMap};

fn noisy_image(seed: u64, w: usize, h: usize) -> RasterImage {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pixels = (0..w * h)
        .map(|i| {
            let (x, y) = (i % w, i / w);
            let base = if (x / 24 + y / 24) % 2 == 0 { 60.0 } else { 190.0 };
            [0, 1, 2].map(|c| (base + 10.0 * c as f64 + rng.random_range(-20.0..20.0)).clamp(0.0, 255.0))
        })
        .collect();
    RasterImage::new(w, h, pixels).unwrap()
}

fn is_connected(sp: &SuperpixelMap, region: usize) -> bool {
    let (w, h) = (sp.width(), sp.height());
    let labels = sp.labels();
    let start = labels.iter().position(|&l| l as usize == region).unwrap();
    let mut seen = vec![false; w * h];
    let mut queue = VecDeque::from([start]);
    seen[start] = true;
    let mut reached = 0;
    while let Some(p) = queue.pop_front() {
        reached += 1;
        let (x, y) = (p % w, p / w);
        let mut next = Vec::new();
        if x > 0 {
            next.push(p - 1);
        }
        if x + 1 < w {
            next.push(p + 1);
        }
        if y > 0 {
            next.push(p - w);
        }
        if y + 1 < h {
            next.push(p + w);
        }
        for q in next {
            if !seen[q] && labels[q] as usize == region {
                seen[q] = true;
                queue.push_back(q);
            }
        }
    }
    reached == sp.pixel_counts()[region]
}

#[test]
fn slic_partitions_into_connected_regions() {
    for seed in 0..3 {
        let img = noisy_image(seed, 160, 120);
        let sp = slic(&to_lab(&img), &SlicParams::default()).unwrap();
        let r = sp.region_count();
        assert!((100..=300).contains(&r), "region count {r}");
        assert_eq!(sp.labels().len(), 160 * 120);
        assert!(sp.labels().iter().all(|&l| (l as usize) < r));
        assert_eq!(sp.pixel_counts().iter().sum::<usize>(), 160 * 120);
        for region in 0..r {
            assert!(is_connected(&sp, region), "region {region} is fragmented");
        }
    }
}

#[test]
fn slic_is_deterministic() {
    let lab = to_lab(&noisy_image(9, 96, 96));
    let p = SlicParams {
        target_regions: 60,
        ..SlicParams::default()
    };
    assert_eq!(slic(&lab, &p).unwrap(), slic(&lab, &p).unwrap());
}

#[test]
fn descriptors_cover_every_region() {
    let img = noisy_image(2, 128, 96);
    let lab = to_lab(&img);
    let sp = slic(&lab, &SlicParams::default()).unwrap();
    let d = extract_descriptors(&lab, &sp).unwrap();
    assert_eq!(d.len(), sp.region_count());
    for (i, r) in d.iter().enumerate() {
        assert_eq!(r.region_index, i);
        assert_eq!(r.hog.len(), HOG_BINS);
        let total: f64 = r.hog.iter().sum();
        assert!((total - 1.0).abs() < 1e-9 || total == 0.0);
        assert!((0.0..=100.0).contains(&r.lab_mean[0]));
    }
    // The lab mean is the plain average of member pixels.
    let members = sp.region_pixels();
    for (region, pixels) in members.iter().enumerate().take(10) {
        let mean_l = pixels.iter().map(|&p| lab.pixels()[p][0]).sum::<f64>() / pixels.len() as f64;
        assert!((mean_l - d[region].lab_mean[0]).abs() < 1e-9);
    }
}

fn histogram() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.0f64..1.0, HOG_BINS).prop_map(|v| {
        let s: f64 = v.iter().sum();
        if s > 0.0 {
            v.iter().map(|x| x / s).collect()
        } else {
            v
        }
    })
}

fn descriptor() -> impl Strategy<Value = RegionDescriptor> {
    (prop::array::uniform3(-100.0f64..100.0), histogram()).prop_map(|(lab, hog)| RegionDescriptor {
        region_index: 0,
        lab_mean: lab,
        hog,
    })
}

proptest! {
    #[test]
    fn chi_square_symmetric_and_bounded(a in histogram(), b in histogram()) {
        let ab = chi_square(&a, &b).unwrap();
        let ba = chi_square(&b, &a).unwrap();
        prop_assert!((ab - ba).abs() < 1e-12);
        prop_assert!(ab >= 0.0);
        // For L1-normalised histograms, 2(a-b)^2/(a+b) <= 2(a+b) bin by bin.
        prop_assert!(ab <= 4.0 + 1e-12);
        prop_assert!(chi_square(&a, &a).unwrap().abs() < 1e-15);
    }

    #[test]
    fn feature_distance_is_a_symmetric_dissimilarity(a in descriptor(), b in descriptor()) {
        let p = DistanceParams::default();
        let ab = feature_distance(&a, &b, &p).unwrap();
        prop_assert!(ab >= 0.0);
        prop_assert!((ab - feature_distance(&b, &a, &p).unwrap()).abs() < 1e-12);
        prop_assert!(feature_distance(&a, &a, &p).unwrap().abs() < 1e-12);
    }
}

#[test]
fn chi_square_rejects_mismatched_bins() {
    assert!(chi_square(&[1.0, 0.0], &[1.0]).is_err());
}
