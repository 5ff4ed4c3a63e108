//! Lloyd's k-means with seeded k-means++ initialisation.

use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Clustering {
    pub assignments: Vec<usize>,
    pub centroids: Vec<Vec<f64>>,
    pub iterations: usize,
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn nearest(p: &[f64], centroids: &[Vec<f64>]) -> (usize, f64) {
    let mut best = (0, f64::INFINITY);
    for (k, c) in centroids.iter().enumerate() {
        let d = sq_dist(p, c);
        if d < best.1 {
            best = (k, d);
        }
    }
    best
}

/// Clusters `points` into `k` groups. Deterministic for a fixed `seed`.
pub fn kmeans(points: &[Vec<f64>], k: usize, seed: u64, max_iters: usize) -> Result<Clustering> {
    let n = points.len();
    if k == 0 {
        return Err(Error::InvalidParameter("k must be at least 1"));
    }
    if k > n {
        return Err(Error::ClusterCountTooLarge { k, regions: n });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut centroids = Vec::with_capacity(k);
    centroids.push(points[rng.random_range(0..n)].clone());
    let mut d2: Vec<f64> = points.iter().map(|p| sq_dist(p, &centroids[0])).collect();
    while centroids.len() < k {
        let total: f64 = d2.iter().sum();
        let pick = if total > 0.0 {
            let mut r = rng.random::<f64>() * total;
            let mut chosen = n - 1;
            for (i, &d) in d2.iter().enumerate() {
                if d > 0.0 && r < d {
                    chosen = i;
                    break;
                }
                r -= d;
            }
            chosen
        } else {
            // All remaining points coincide with a centroid.
            rng.random_range(0..n)
        };
        centroids.push(points[pick].clone());
        for (d, p) in d2.iter_mut().zip(points) {
            *d = d.min(sq_dist(p, &points[pick]));
        }
    }

    let dim = points[0].len();
    let mut assignments = vec![usize::MAX; n];
    let mut iterations = 0;
    for _ in 0..max_iters.max(1) {
        iterations += 1;
        let mut changed = false;
        for (a, p) in assignments.iter_mut().zip(points) {
            let (c, _) = nearest(p, &centroids);
            if *a != c {
                *a = c;
                changed = true;
            }
        }

        let mut sums = vec![vec![0.0; dim]; k];
        let mut counts = vec![0usize; k];
        for (p, &a) in points.iter().zip(&assignments) {
            counts[a] += 1;
            for (s, v) in sums[a].iter_mut().zip(p) {
                *s += v;
            }
        }
        for c in 0..k {
            if counts[c] == 0 {
                // Reseed from the point farthest from its own centroid, taken
                // from a cluster that can spare it.
                let far = (0..n)
                    .filter(|&i| counts[assignments[i]] > 1)
                    .max_by(|&i, &j| {
                        sq_dist(&points[i], &centroids[assignments[i]])
                            .total_cmp(&sq_dist(&points[j], &centroids[assignments[j]]))
                    })
                    .expect("non-empty");
                counts[assignments[far]] -= 1;
                for (s, v) in sums[assignments[far]].iter_mut().zip(&points[far]) {
                    *s -= v;
                }
                assignments[far] = c;
                counts[c] = 1;
                sums[c] = points[far].clone();
                changed = true;
            }
        }
        for c in 0..k {
            if counts[c] > 0 {
                centroids[c] = sums[c].iter().map(|s| s / counts[c] as f64).collect();
            }
        }
        if !changed {
            break;
        }
    }

    Ok(Clustering {
        assignments,
        centroids,
        iterations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn separates_two_blobs() {
        let mut pts = Vec::new();
        for i in 0..10 {
            pts.push(vec![i as f64 * 0.01, 0.0]);
            pts.push(vec![100.0 + i as f64 * 0.01, 5.0]);
        }
        let c = kmeans(&pts, 2, 3, 100).unwrap();
        for i in (0..20).step_by(2) {
            assert_eq!(c.assignments[i], c.assignments[0]);
            assert_eq!(c.assignments[i + 1], c.assignments[1]);
        }
        assert_ne!(c.assignments[0], c.assignments[1]);
    }

    #[test]
    fn k_equal_n_gives_singletons() {
        let pts: Vec<Vec<f64>> = (0..6).map(|i| vec![i as f64]).collect();
        let c = kmeans(&pts, 6, 11, 100).unwrap();
        let mut seen = c.assignments.clone();
        seen.sort_unstable();
        assert_eq!(seen, vec![0, 1, 2, 3, 4, 5]);
    }

    #[test]
    fn duplicate_points_still_fill_every_cluster() {
        let pts = vec![vec![1.0]; 5];
        let c = kmeans(&pts, 3, 0, 100).unwrap();
        for k in 0..3 {
            assert!(c.assignments.contains(&k));
        }
    }

    #[test]
    fn deterministic_and_bounded() {
        let pts: Vec<Vec<f64>> = (0..40).map(|i| vec![(i * 37 % 11) as f64, (i % 7) as f64]).collect();
        assert_eq!(kmeans(&pts, 4, 9, 100).unwrap(), kmeans(&pts, 4, 9, 100).unwrap());
        assert!(matches!(kmeans(&pts, 41, 0, 10), Err(Error::ClusterCountTooLarge { .. })));
    }
}
