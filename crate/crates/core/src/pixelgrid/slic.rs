//! SLIC over-segmentation with a connectivity post-pass.

use alloc::collections::VecDeque;
use alloc::vec;
use alloc::vec::Vec;

use super::{Lab, LabImage};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlicParams {
    pub target_regions: usize,
    pub compactness: f64,
    pub iterations: usize,
}

impl Default for SlicParams {
    fn default() -> Self {
        Self {
            target_regions: 200,
            compactness: 10.0,
            iterations: 10,
        }
    }
}

/// Pixel-to-region labelling. Every region is non-empty and 4-connected.
#[derive(Debug, Clone, PartialEq)]
pub struct SuperpixelMap {
    width: usize,
    height: usize,
    labels: Vec<u32>,
    region_count: usize,
    centroids: Vec<(f64, f64)>,
    pixel_counts: Vec<usize>,
}

impl SuperpixelMap {
    /// Wraps an explicit labelling. Labels must cover `0..region_count`
    /// with every region non-empty.
    pub fn from_labels(width: usize, height: usize, labels: Vec<u32>) -> Result<Self> {
        if labels.len() != width * height {
            return Err(Error::DimensionMismatch {
                expected: width * height,
                actual: labels.len(),
            });
        }
        let region_count = labels.iter().map(|&l| l as usize + 1).max().unwrap_or(0);
        let mut counts = vec![0usize; region_count];
        let mut sx = vec![0.0f64; region_count];
        let mut sy = vec![0.0f64; region_count];
        for (i, &l) in labels.iter().enumerate() {
            let l = l as usize;
            counts[l] += 1;
            sx[l] += (i % width) as f64;
            sy[l] += (i / width) as f64;
        }
        if counts.contains(&0) {
            return Err(Error::InvalidImage("superpixel labels are not contiguous"));
        }
        let centroids = (0..region_count)
            .map(|r| (sx[r] / counts[r] as f64, sy[r] / counts[r] as f64))
            .collect();
        Ok(Self {
            width,
            height,
            labels,
            region_count,
            centroids,
            pixel_counts: counts,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn labels(&self) -> &[u32] {
        &self.labels
    }

    pub fn label(&self, x: usize, y: usize) -> usize {
        self.labels[y * self.width + x] as usize
    }

    pub fn region_count(&self) -> usize {
        self.region_count
    }

    pub fn centroids(&self) -> &[(f64, f64)] {
        &self.centroids
    }

    pub fn pixel_counts(&self) -> &[usize] {
        &self.pixel_counts
    }

    /// Row-major pixel indices of every region.
    pub fn region_pixels(&self) -> Vec<Vec<usize>> {
        let mut out: Vec<Vec<usize>> = self
            .pixel_counts
            .iter()
            .map(|&n| Vec::with_capacity(n))
            .collect();
        for (i, &l) in self.labels.iter().enumerate() {
            out[l as usize].push(i);
        }
        out
    }

    /// Expands per-region values into a row-major pixel map.
    pub fn render(&self, region_values: &[f64]) -> Vec<f64> {
        self.labels
            .iter()
            .map(|&l| region_values[l as usize])
            .collect()
    }
}

fn lab_dist(a: Lab, b: Lab) -> f64 {
    libm::sqrt((0..3).map(|c| (a[c] - b[c]) * (a[c] - b[c])).sum())
}

fn gradient_at(lab: &LabImage, x: usize, y: usize) -> f64 {
    let (w, h) = (lab.width(), lab.height());
    let l = lab.pixel(x.saturating_sub(1), y);
    let r = lab.pixel((x + 1).min(w - 1), y);
    let u = lab.pixel(x, y.saturating_sub(1));
    let d = lab.pixel(x, (y + 1).min(h - 1));
    let sq = |a: Lab, b: Lab| (0..3).map(|c| (a[c] - b[c]) * (a[c] - b[c])).sum::<f64>();
    sq(l, r) + sq(u, d)
}

#[derive(Clone, Copy)]
struct Centre {
    lab: Lab,
    x: f64,
    y: f64,
}

/// Segments `lab` into roughly `params.target_regions` compact superpixels.
pub fn slic(lab: &LabImage, params: &SlicParams) -> Result<SuperpixelMap> {
    let (w, h) = (lab.width(), lab.height());
    let n = w * h;
    let target = params.target_regions;
    if target < 4 {
        return Err(Error::InvalidParameter("target_regions must be at least 4"));
    }
    if target > n / 16 {
        return Err(Error::TargetTooLarge {
            target,
            max: n / 16,
        });
    }
    if params.compactness <= 0.0 {
        return Err(Error::InvalidParameter("compactness must be positive"));
    }

    let step = libm::sqrt(n as f64 / target as f64);
    let nx = (libm::round(w as f64 / step) as usize).max(1);
    let ny = (libm::round(h as f64 / step) as usize).max(1);
    let (cell_w, cell_h) = (w as f64 / nx as f64, h as f64 / ny as f64);

    let mut centres = Vec::with_capacity(nx * ny);
    for gy in 0..ny {
        for gx in 0..nx {
            let sx = (((gx as f64 + 0.5) * cell_w) as usize).min(w - 1);
            let sy = (((gy as f64 + 0.5) * cell_h) as usize).min(h - 1);
            // Move the seed to the flattest pixel of its 3x3 window.
            let mut best = (gradient_at(lab, sx, sy), sx, sy);
            for yy in sy.saturating_sub(1)..=(sy + 1).min(h - 1) {
                for xx in sx.saturating_sub(1)..=(sx + 1).min(w - 1) {
                    let g = gradient_at(lab, xx, yy);
                    if g < best.0 {
                        best = (g, xx, yy);
                    }
                }
            }
            let (_, cx, cy) = best;
            centres.push(Centre {
                lab: lab.pixel(cx, cy),
                x: cx as f64,
                y: cy as f64,
            });
        }
    }

    // Start from the grid cells so every pixel has a label even if no
    // search window reaches it.
    let mut labels: Vec<u32> = (0..n)
        .map(|i| {
            let gx = (((i % w) as f64 / cell_w) as usize).min(nx - 1);
            let gy = (((i / w) as f64 / cell_h) as usize).min(ny - 1);
            (gy * nx + gx) as u32
        })
        .collect();
    let mut dist = vec![f64::INFINITY; n];
    let spatial = params.compactness / step;
    let radius = libm::ceil(step) as isize;

    for _ in 0..params.iterations {
        dist.fill(f64::INFINITY);
        for (k, c) in centres.iter().enumerate() {
            let cx = libm::round(c.x) as isize;
            let cy = libm::round(c.y) as isize;
            let y0 = (cy - radius).max(0) as usize;
            let y1 = ((cy + radius) as usize).min(h - 1);
            let x0 = (cx - radius).max(0) as usize;
            let x1 = ((cx + radius) as usize).min(w - 1);
            for y in y0..=y1 {
                let dy = y as f64 - c.y;
                for x in x0..=x1 {
                    let i = y * w + x;
                    let dx = x as f64 - c.x;
                    let d = lab_dist(lab.pixels()[i], c.lab)
                        + spatial * libm::sqrt(dx * dx + dy * dy);
                    if d < dist[i] {
                        dist[i] = d;
                        labels[i] = k as u32;
                    }
                }
            }
        }

        let mut sums = vec![[0.0f64; 5]; centres.len()];
        let mut counts = vec![0usize; centres.len()];
        for (i, &l) in labels.iter().enumerate() {
            let s = &mut sums[l as usize];
            let p = lab.pixels()[i];
            s[0] += p[0];
            s[1] += p[1];
            s[2] += p[2];
            s[3] += (i % w) as f64;
            s[4] += (i / w) as f64;
            counts[l as usize] += 1;
        }
        for (c, (s, &m)) in centres.iter_mut().zip(sums.iter().zip(&counts)) {
            if m > 0 {
                let m = m as f64;
                c.lab = [s[0] / m, s[1] / m, s[2] / m];
                c.x = s[3] / m;
                c.y = s[4] / m;
            }
        }
    }

    let min_size = ((n / centres.len()) / 4).max(1);
    let labels = enforce_connectivity(&labels, w, h, min_size);
    SuperpixelMap::from_labels(w, h, labels)
}

fn find(parent: &mut [usize], mut c: usize) -> usize {
    while parent[c] != c {
        parent[c] = parent[parent[c]];
        c = parent[c];
    }
    c
}

/// Splits labels into 4-connected components, keeps the largest component of
/// each label when it is big enough, and merges every other fragment into
/// its largest neighbouring component. Output labels are compact and ordered
/// by first appearance in raster order.
fn enforce_connectivity(labels: &[u32], w: usize, h: usize, min_size: usize) -> Vec<u32> {
    let n = w * h;
    let mut comp = vec![usize::MAX; n];
    let mut comp_label = Vec::new();
    let mut comp_size = Vec::new();
    let mut queue = VecDeque::new();
    for start in 0..n {
        if comp[start] != usize::MAX {
            continue;
        }
        let id = comp_size.len();
        let label = labels[start];
        comp[start] = id;
        queue.push_back(start);
        let mut size = 0;
        while let Some(i) = queue.pop_front() {
            size += 1;
            let (x, y) = (i % w, i / w);
            let mut push = |j: usize| {
                if comp[j] == usize::MAX && labels[j] == label {
                    comp[j] = id;
                    queue.push_back(j);
                }
            };
            if x > 0 {
                push(i - 1);
            }
            if x + 1 < w {
                push(i + 1);
            }
            if y > 0 {
                push(i - w);
            }
            if y + 1 < h {
                push(i + w);
            }
        }
        comp_label.push(label);
        comp_size.push(size);
    }

    let comps = comp_size.len();
    let label_count = comp_label.iter().map(|&l| l as usize + 1).max().unwrap_or(0);
    let mut largest = vec![usize::MAX; label_count];
    for c in 0..comps {
        let l = comp_label[c] as usize;
        if largest[l] == usize::MAX || comp_size[c] > comp_size[largest[l]] {
            largest[l] = c;
        }
    }

    let mut neighbours: Vec<Vec<usize>> = vec![Vec::new(); comps];
    for y in 0..h {
        for x in 0..w {
            let i = y * w + x;
            let mut link = |j: usize| {
                let (a, b) = (comp[i], comp[j]);
                if a != b {
                    neighbours[a].push(b);
                    neighbours[b].push(a);
                }
            };
            if x + 1 < w {
                link(i + 1);
            }
            if y + 1 < h {
                link(i + w);
            }
        }
    }
    for nb in &mut neighbours {
        nb.sort_unstable();
        nb.dedup();
    }

    let mut parent: Vec<usize> = (0..comps).collect();
    let mut size = comp_size.clone();
    if comps > 1 {
        for c in 0..comps {
            let keep = largest[comp_label[c] as usize] == c && comp_size[c] >= min_size;
            if keep {
                continue;
            }
            let root = find(&mut parent, c);
            let mut best: Option<usize> = None;
            for &nb in &neighbours[c] {
                let r = find(&mut parent, nb);
                if r == root {
                    continue;
                }
                best = match best {
                    Some(b) if size[b] > size[r] || (size[b] == size[r] && b < r) => Some(b),
                    _ => Some(r),
                };
            }
            if let Some(target) = best {
                parent[root] = target;
                size[target] += size[root];
            }
        }
    }

    let mut relabel = vec![u32::MAX; comps];
    let mut next = 0u32;
    comp.iter()
        .map(|&c| {
            let r = find(&mut parent, c);
            if relabel[r] == u32::MAX {
                relabel[r] = next;
                next += 1;
            }
            relabel[r]
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pixelgrid::{to_lab, RasterImage};

    fn uniform(w: usize, h: usize) -> LabImage {
        to_lab(&RasterImage::new(w, h, vec![[90.0, 140.0, 60.0]; w * h]).unwrap())
    }

    #[test]
    fn rejects_oversized_target() {
        let lab = uniform(20, 20);
        let p = SlicParams {
            target_regions: 100,
            ..SlicParams::default()
        };
        assert!(matches!(slic(&lab, &p), Err(Error::TargetTooLarge { .. })));
    }

    #[test]
    fn uniform_image_gives_regular_grid() {
        let lab = uniform(200, 200);
        let p = SlicParams {
            target_regions: 100,
            ..SlicParams::default()
        };
        let sp = slic(&lab, &p).unwrap();
        let r = sp.region_count();
        assert!((50..=150).contains(&r), "{r} regions");
        let mean = (200 * 200) as f64 / r as f64;
        for &c in sp.pixel_counts() {
            let c = c as f64;
            assert!(c <= 2.0 * mean && c >= mean / 2.0, "area {c} vs mean {mean}");
        }
    }

    #[test]
    fn connectivity_pass_merges_fragments() {
        // Label 0 split in two; the small piece must be absorbed.
        #[rustfmt::skip]
        let labels = vec![
            0, 0, 1, 1,
            0, 0, 1, 1,
            1, 1, 1, 0,
            1, 1, 1, 1,
        ];
        let out = enforce_connectivity(&labels, 4, 4, 1);
        assert_eq!(out[11], out[10]);
        assert_eq!(out.iter().copied().max(), Some(1));
    }
}
