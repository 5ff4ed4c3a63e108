//! Closed-loop superpixel graph and its affinity / degree matrices.
//!
//! Edges join spatially adjacent regions, regions two hops apart, and every
//! pair of regions touching the image border. Each edge weighs
//! `exp(-dist / sigma2)` where `dist` is the mixed feature distance.

use alloc::collections::BTreeSet;
use alloc::vec;
use alloc::vec::Vec;

use crate::features::{feature_distance, DistanceParams, RegionDescriptor};
use crate::pixelgrid::SuperpixelMap;
use crate::{Error, Result};

/// One of the four image borders.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Side {
    Top,
    Bottom,
    Left,
    Right,
}

impl Side {
    pub const ALL: [Side; 4] = [Side::Top, Side::Bottom, Side::Left, Side::Right];

    pub const fn bit(self) -> u8 {
        match self {
            Side::Top => 1,
            Side::Bottom => 2,
            Side::Left => 4,
            Side::Right => 8,
        }
    }

    pub const fn index(self) -> usize {
        match self {
            Side::Top => 0,
            Side::Bottom => 1,
            Side::Left => 2,
            Side::Right => 3,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Side::Top => "top",
            Side::Bottom => "bottom",
            Side::Left => "left",
            Side::Right => "right",
        }
    }
}

/// Set of borders, one bit per [`Side`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Hash)]
pub struct Sides(u8);

impl Sides {
    pub const NONE: Sides = Sides(0);

    pub const fn of(sides: &[Side]) -> Sides {
        let mut bits = 0;
        let mut i = 0;
        while i < sides.len() {
            bits |= sides[i].bit();
            i += 1;
        }
        Sides(bits)
    }

    pub fn contains(self, side: Side) -> bool {
        self.0 & side.bit() != 0
    }

    pub fn insert(&mut self, side: Side) {
        self.0 |= side.bit();
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn iter(self) -> impl Iterator<Item = Side> {
        Side::ALL.into_iter().filter(move |s| self.contains(*s))
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }
}

/// How raw feature distances are scaled before entering the kernel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DistanceScale {
    /// Distances enter `exp(-d / sigma2)` unchanged.
    Raw,
    /// Distances are divided by the largest distance over the graph's edges,
    /// so they lie in `[0, 1]`.
    #[default]
    MaxEdge,
}

impl DistanceScale {
    pub fn name(self) -> &'static str {
        match self {
            DistanceScale::Raw => "raw",
            DistanceScale::MaxEdge => "max-edge",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "raw" => Some(DistanceScale::Raw),
            "max-edge" => Some(DistanceScale::MaxEdge),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GraphParams {
    pub sigma2: f64,
    pub distance: DistanceParams,
    pub scale: DistanceScale,
}

impl Default for GraphParams {
    fn default() -> Self {
        Self {
            sigma2: 0.1,
            distance: DistanceParams::default(),
            scale: DistanceScale::default(),
        }
    }
}

impl GraphParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.sigma2 > 0.0) {
            return Err(Error::InvalidParameter("sigma2 must be positive"));
        }
        self.distance.validate()
    }
}

/// The kernel `exp(-dist / sigma2)`.
pub fn edge_weight(dist: f64, sigma2: f64) -> f64 {
    libm::exp(-dist / sigma2)
}

#[derive(Debug, Clone, PartialEq)]
pub struct AffinityGraph {
    n: usize,
    weights: Vec<f64>,
    degrees: Vec<f64>,
    boundary: Vec<Sides>,
    adjacency: Vec<Vec<usize>>,
    edges: Vec<(usize, usize)>,
    distance_unit: f64,
}

impl AffinityGraph {
    pub fn node_count(&self) -> usize {
        self.n
    }

    /// Row-major `n x n` weight matrix.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn weight(&self, i: usize, j: usize) -> f64 {
        self.weights[i * self.n + j]
    }

    pub fn degrees(&self) -> &[f64] {
        &self.degrees
    }

    /// Border contact of each node.
    pub fn boundary_sides(&self) -> &[Sides] {
        &self.boundary
    }

    /// Spatial (one-hop) neighbours of each node, sorted.
    pub fn adjacency(&self) -> &[Vec<usize>] {
        &self.adjacency
    }

    /// Every edge `(i, j)` with `i < j`, in lexicographic order.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// Divisor applied to raw feature distances (1 for [`DistanceScale::Raw`]).
    pub fn distance_unit(&self) -> f64 {
        self.distance_unit
    }

    pub fn is_edge(&self, i: usize, j: usize) -> bool {
        let (a, b) = if i < j { (i, j) } else { (j, i) };
        self.edges.binary_search(&(a, b)).is_ok()
    }

    /// `(i, j, w_ij)` for every edge, `i < j`.
    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.edges.iter().map(|&(i, j)| (i, j, self.weight(i, j)))
    }

    /// Builds a graph directly from a dense weight matrix. Used by tests and
    /// callers that bring their own affinities; every positive entry is an
    /// edge and nodes carry the supplied border flags.
    pub fn from_weights(n: usize, weights: Vec<f64>, boundary: Vec<Sides>) -> Result<Self> {
        if weights.len() != n * n {
            return Err(Error::DimensionMismatch {
                expected: n * n,
                actual: weights.len(),
            });
        }
        if boundary.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                actual: boundary.len(),
            });
        }
        for i in 0..n {
            if weights[i * n + i] != 0.0 {
                return Err(Error::InvalidParameter("weight matrix must have a zero diagonal"));
            }
            for j in 0..n {
                let w = weights[i * n + j];
                if !(0.0..=1.0).contains(&w) || w != weights[j * n + i] {
                    return Err(Error::InvalidParameter(
                        "weight matrix must be symmetric with entries in [0, 1]",
                    ));
                }
            }
        }
        let edges = (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .filter(|&(i, j)| weights[i * n + j] > 0.0)
            .collect();
        let degrees = weights.chunks(n.max(1)).take(n).map(|r| r.iter().sum()).collect();
        Ok(Self {
            n,
            weights,
            degrees,
            boundary,
            adjacency: vec![Vec::new(); n],
            edges,
            distance_unit: 1.0,
        })
    }
}

/// Spatial adjacency and border contact of every region.
pub fn region_adjacency(sp: &SuperpixelMap) -> (Vec<Vec<usize>>, Vec<Sides>) {
    let (w, h) = (sp.width(), sp.height());
    let r = sp.region_count();
    let mut sets: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); r];
    let mut sides = vec![Sides::NONE; r];
    for y in 0..h {
        for x in 0..w {
            let a = sp.label(x, y);
            if y == 0 {
                sides[a].insert(Side::Top);
            }
            if y == h - 1 {
                sides[a].insert(Side::Bottom);
            }
            if x == 0 {
                sides[a].insert(Side::Left);
            }
            if x == w - 1 {
                sides[a].insert(Side::Right);
            }
            if x + 1 < w {
                let b = sp.label(x + 1, y);
                if a != b {
                    sets[a].insert(b);
                    sets[b].insert(a);
                }
            }
            if y + 1 < h {
                let b = sp.label(x, y + 1);
                if a != b {
                    sets[a].insert(b);
                    sets[b].insert(a);
                }
            }
        }
    }
    (sets.into_iter().map(|s| s.into_iter().collect()).collect(), sides)
}

pub fn build_graph(
    sp: &SuperpixelMap,
    descriptors: &[RegionDescriptor],
    params: &GraphParams,
) -> Result<AffinityGraph> {
    params.validate()?;
    let n = sp.region_count();
    if descriptors.len() != n
        || descriptors.iter().enumerate().any(|(i, d)| d.region_index != i)
    {
        return Err(Error::IndexMismatch {
            regions: n,
            descriptors: descriptors.len(),
        });
    }
    let (adjacency, boundary) = region_adjacency(sp);

    let mut edge_set: BTreeSet<(usize, usize)> = BTreeSet::new();
    let mut add = |i: usize, j: usize| {
        if i != j {
            edge_set.insert(if i < j { (i, j) } else { (j, i) });
        }
    };
    for i in 0..n {
        for &j in &adjacency[i] {
            add(i, j);
            for &k in &adjacency[j] {
                add(i, k);
            }
        }
    }
    let border: Vec<usize> = (0..n).filter(|&i| !boundary[i].is_empty()).collect();
    for (a, &i) in border.iter().enumerate() {
        for &j in &border[a + 1..] {
            add(i, j);
        }
    }
    let edges: Vec<(usize, usize)> = edge_set.into_iter().collect();

    let dists = edges
        .iter()
        .map(|&(i, j)| feature_distance(&descriptors[i], &descriptors[j], &params.distance))
        .collect::<Result<Vec<f64>>>()?;
    let distance_unit = match params.scale {
        DistanceScale::Raw => 1.0,
        DistanceScale::MaxEdge => {
            let max = dists.iter().copied().fold(0.0, f64::max);
            if max > 0.0 {
                max
            } else {
                1.0
            }
        }
    };

    let mut weights = vec![0.0; n * n];
    for (&(i, j), &d) in edges.iter().zip(&dists) {
        let w = edge_weight(d / distance_unit, params.sigma2);
        weights[i * n + j] = w;
        weights[j * n + i] = w;
    }
    let degrees = (0..n).map(|i| weights[i * n..(i + 1) * n].iter().sum()).collect();

    Ok(AffinityGraph {
        n,
        weights,
        degrees,
        boundary,
        adjacency,
        edges,
        distance_unit,
    })
}

/// Nodes whose region touches `side`.
pub fn boundary_set(g: &AffinityGraph, side: Side) -> Vec<usize> {
    g.boundary
        .iter()
        .enumerate()
        .filter(|(_, s)| s.contains(side))
        .map(|(i, _)| i)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::features::HOG_BINS;

    fn flat_descriptors(n: usize) -> Vec<RegionDescriptor> {
        (0..n)
            .map(|i| RegionDescriptor {
                region_index: i,
                lab_mean: [50.0, 0.0, 0.0],
                hog: vec![0.0; HOG_BINS],
            })
            .collect()
    }

    /// `cells x cells` blocks of `block` pixels each.
    fn block_grid(cells: usize, block: usize) -> SuperpixelMap {
        let side = cells * block;
        let labels = (0..side * side)
            .map(|i| {
                let (x, y) = (i % side, i / side);
                ((y / block) * cells + x / block) as u32
            })
            .collect();
        SuperpixelMap::from_labels(side, side, labels).unwrap()
    }

    #[test]
    fn two_by_two_is_complete() {
        let sp = block_grid(2, 8);
        let g = build_graph(&sp, &flat_descriptors(4), &GraphParams::default()).unwrap();
        assert_eq!(g.edges().len(), 6);
        for i in 0..4 {
            assert_eq!(g.weight(i, i), 0.0);
            for j in 0..4 {
                if i != j {
                    assert_eq!(g.weight(i, j), 1.0);
                }
            }
        }
    }

    #[test]
    fn kernel_value() {
        assert!((edge_weight(0.1, 0.1) - libm::exp(-1.0)).abs() < 1e-9);
        assert_eq!(edge_weight(0.0, 0.1), 1.0);
    }

    #[test]
    fn boundary_membership_on_three_by_three() {
        let sp = block_grid(3, 6);
        let g = build_graph(&sp, &flat_descriptors(9), &GraphParams::default()).unwrap();
        assert_eq!(boundary_set(&g, Side::Top), vec![0, 1, 2]);
        assert_eq!(boundary_set(&g, Side::Left), vec![0, 3, 6]);
        // corner in two sets, centre in none
        assert_eq!(g.boundary_sides()[0].len(), 2);
        assert!(g.boundary_sides()[4].is_empty());
        for s in Side::ALL {
            assert!(!boundary_set(&g, s).contains(&4));
        }
        // centre reaches every node within two hops; corners 0 and 8 via rule 3
        for j in [0, 1, 2, 3, 5, 6, 7, 8] {
            assert!(g.is_edge(4, j));
        }
        assert!(g.is_edge(0, 8));
    }

    #[test]
    fn rejects_misaligned_descriptors() {
        let sp = block_grid(2, 8);
        assert!(matches!(
            build_graph(&sp, &flat_descriptors(3), &GraphParams::default()),
            Err(Error::IndexMismatch { .. })
        ));
    }
}
