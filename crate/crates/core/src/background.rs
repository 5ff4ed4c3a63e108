//! Background maps from five combinations of image borders, and their
//! weighted aggregate.

use alloc::vec::Vec;

use crate::graph::{boundary_set, AffinityGraph, Side, Sides};
use crate::map::{SaliencyMap, Stage};
use crate::ranking::{QueryVector, Ranker, RankingParams};
use crate::{Error, Result};

/// A set of borders used together as background queries.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BackgroundTemplate {
    pub id: u8,
    pub sides: Sides,
}

/// All four borders, then each combination leaving one border out.
pub const TEMPLATES: [BackgroundTemplate; 5] = [
    BackgroundTemplate {
        id: 1,
        sides: Sides::of(&[Side::Top, Side::Bottom, Side::Left, Side::Right]),
    },
    BackgroundTemplate {
        id: 2,
        sides: Sides::of(&[Side::Top, Side::Bottom, Side::Left]),
    },
    BackgroundTemplate {
        id: 3,
        sides: Sides::of(&[Side::Top, Side::Bottom, Side::Right]),
    },
    BackgroundTemplate {
        id: 4,
        sides: Sides::of(&[Side::Top, Side::Left, Side::Right]),
    },
    BackgroundTemplate {
        id: 5,
        sides: Sides::of(&[Side::Bottom, Side::Left, Side::Right]),
    },
];

/// Mixing weights of the five template maps. Always non-negative and
/// summing to one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TemplateWeights([f64; 5]);

impl Default for TemplateWeights {
    fn default() -> Self {
        Self([0.2; 5])
    }
}

impl TemplateWeights {
    /// Normalises `raw` onto the simplex. Rejects negative entries and an
    /// all-zero vector.
    pub fn new(raw: [f64; 5]) -> Result<Self> {
        if raw.iter().any(|&v| !(v >= 0.0) || !v.is_finite()) {
            return Err(Error::InvalidParameter("template weights must be non-negative"));
        }
        let total: f64 = raw.iter().sum();
        if !(total > 0.0) {
            return Err(Error::InvalidParameter("template weights must not all be zero"));
        }
        if (total - 1.0).abs() <= 4.0 * f64::EPSILON {
            return Ok(Self(raw));
        }
        Ok(Self(raw.map(|v| v / total)))
    }

    pub fn values(&self) -> [f64; 5] {
        self.0
    }
}

/// Normalised relevance of every node to each border's queries, computed
/// once and shared by all templates.
#[derive(Debug, Clone)]
pub struct SideRankings {
    ranks: [Vec<f64>; 4],
    width: usize,
    height: usize,
}

impl SideRankings {
    pub fn compute(g: &AffinityGraph, ranker: &Ranker, width: usize, height: usize) -> Result<Self> {
        let n = g.node_count();
        let mut ranks: [Vec<f64>; 4] = Default::default();
        for side in Side::ALL {
            let nodes = boundary_set(g, side);
            if nodes.is_empty() {
                return Err(Error::EmptyBoundary);
            }
            let f = ranker.rank(&QueryVector::from_indices(n, nodes))?;
            ranks[side.index()] = f.normalized();
        }
        Ok(Self {
            ranks,
            width,
            height,
        })
    }

    /// Normalised ranking against one border.
    pub fn side(&self, side: Side) -> &[f64] {
        &self.ranks[side.index()]
    }

    /// Product of complements over the template's borders. Already in `[0, 1]`
    /// and left unscaled, so a map that is low everywhere is not stretched
    /// into noise.
    pub fn template_map(&self, t: &BackgroundTemplate) -> Result<SaliencyMap> {
        if t.sides.is_empty() {
            return Err(Error::InvalidParameter("template has no borders"));
        }
        let n = self.ranks[0].len();
        let product: Vec<f64> = (0..n)
            .map(|i| t.sides.iter().map(|s| 1.0 - self.side(s)[i]).product())
            .collect();
        Ok(SaliencyMap::new(
            product,
            Stage::Template(t.id),
            self.width,
            self.height,
        ))
    }

    pub fn all_templates(&self) -> Result<[SaliencyMap; 5]> {
        let maps = TEMPLATES
            .iter()
            .map(|t| self.template_map(t))
            .collect::<Result<Vec<_>>>()?;
        Ok(maps.try_into().expect("five templates"))
    }
}

/// Background map of a single template.
pub fn template_map(
    g: &AffinityGraph,
    t: &BackgroundTemplate,
    p: &RankingParams,
    width: usize,
    height: usize,
) -> Result<SaliencyMap> {
    let ranker = Ranker::new(g, p)?;
    SideRankings::compute(g, &ranker, width, height)?.template_map(t)
}

/// Convex combination of the five template maps, clamped to `[0, 1]`.
pub fn aggregate(maps: &[SaliencyMap; 5], w: &TemplateWeights) -> Result<SaliencyMap> {
    let n = maps[0].region_count();
    if let Some(bad) = maps.iter().find(|m| m.region_count() != n) {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: bad.region_count(),
        });
    }
    let lambda = w.values();
    let scores = (0..n)
        .map(|i| {
            let s: f64 = maps.iter().zip(&lambda).map(|(m, l)| l * m.scores[i]).sum();
            s.clamp(0.0, 1.0)
        })
        .collect();
    Ok(SaliencyMap::new(
        scores,
        Stage::Background,
        maps[0].width,
        maps[0].height,
    ))
}

/// Pixel-resolution template maps and ground truth of one validation image.
#[derive(Debug, Clone, PartialEq)]
pub struct ValidationSample {
    pub maps: [Vec<f64>; 5],
    pub truth: Vec<f64>,
}

/// Non-negative least squares over the stacked validation pixels, then
/// rescaled onto the simplex.
///
/// A tiny ridge term makes the problem strictly convex, so ties between
/// equally good templates resolve to the minimum-norm (most even) mix.
pub fn fit_weights(validation: &[ValidationSample]) -> Result<TemplateWeights> {
    if validation.is_empty() {
        return Err(Error::EmptyValidationSet);
    }
    let mut gram = [[0.0f64; 5]; 5];
    let mut rhs = [0.0f64; 5];
    for sample in validation {
        let len = sample.truth.len();
        if let Some(m) = sample.maps.iter().find(|m| m.len() != len) {
            return Err(Error::DimensionMismatch {
                expected: len,
                actual: m.len(),
            });
        }
        for p in 0..len {
            let s: [f64; 5] = core::array::from_fn(|k| sample.maps[k][p]);
            for a in 0..5 {
                rhs[a] += s[a] * sample.truth[p];
                for b in 0..5 {
                    gram[a][b] += s[a] * s[b];
                }
            }
        }
    }

    let trace: f64 = (0..5).map(|k| gram[k][k]).sum();
    let ridge = 1e-8 * trace / 5.0 + 1e-300;
    for (k, row) in gram.iter_mut().enumerate() {
        row[k] += ridge;
    }

    // Five unknowns: enumerate every active set and keep the best feasible
    // candidate. With a strictly convex objective this is the exact optimum.
    let objective =
        |x: &[f64; 5]| -> f64 {
            let mut v = 0.0;
            for a in 0..5 {
                v -= 2.0 * rhs[a] * x[a];
                for b in 0..5 {
                    v += x[a] * gram[a][b] * x[b];
                }
            }
            v
        };
    let mut best = ([0.0f64; 5], 0.0f64);
    for mask in 1u32..32 {
        let free: Vec<usize> = (0..5).filter(|k| mask & (1 << k) != 0).collect();
        let Some(sol) = solve_subset(&gram, &rhs, &free) else {
            continue;
        };
        if sol.iter().any(|&v| v < 0.0) {
            continue;
        }
        let mut x = [0.0; 5];
        for (&k, v) in free.iter().zip(sol) {
            x[k] = v;
        }
        let obj = objective(&x);
        if obj < best.1 {
            best = (x, obj);
        }
    }
    TemplateWeights::new(best.0).or_else(|_| Ok(TemplateWeights::default()))
}

fn solve_subset(gram: &[[f64; 5]; 5], rhs: &[f64; 5], free: &[usize]) -> Option<Vec<f64>> {
    let m = free.len();
    let mut a: Vec<Vec<f64>> = free
        .iter()
        .map(|&i| {
            let mut row: Vec<f64> = free.iter().map(|&j| gram[i][j]).collect();
            row.push(rhs[i]);
            row
        })
        .collect();
    // Gaussian elimination with partial pivoting on the augmented matrix.
    for col in 0..m {
        let pivot = (col..m).max_by(|&x, &y| a[x][col].abs().total_cmp(&a[y][col].abs()))?;
        if a[pivot][col].abs() < 1e-300 {
            return None;
        }
        a.swap(col, pivot);
        for row in col + 1..m {
            let factor = a[row][col] / a[col][col];
            for c in col..=m {
                a[row][c] -= factor * a[col][c];
            }
        }
    }
    let mut x = alloc::vec![0.0; m];
    for row in (0..m).rev() {
        let s: f64 = (row + 1..m).map(|c| a[row][c] * x[c]).sum();
        x[row] = (a[row][m] - s) / a[row][row];
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn templates_match_border_table() {
        use Side::*;
        let rows = [
            (Top, [1, 1, 1, 1, 0]),
            (Bottom, [1, 1, 1, 0, 1]),
            (Left, [1, 1, 0, 1, 1]),
            (Right, [1, 0, 1, 1, 1]),
        ];
        for (side, flags) in rows {
            for (t, &f) in TEMPLATES.iter().zip(&flags) {
                assert_eq!(t.sides.contains(side), f == 1, "{side:?} in BT{}", t.id);
            }
        }
        assert_eq!(TEMPLATES.map(|t| t.id), [1, 2, 3, 4, 5]);
    }

    fn map(scores: Vec<f64>) -> SaliencyMap {
        SaliencyMap::new(scores, Stage::Template(1), 16, 16)
    }

    #[test]
    fn aggregate_identical_maps() {
        let m = map(vec![0.0, 0.3, 1.0]);
        let maps = [m.clone(), m.clone(), m.clone(), m.clone(), m.clone()];
        let w = TemplateWeights::new([0.1, 0.5, 0.2, 0.1, 0.1]).unwrap();
        let out = aggregate(&maps, &w).unwrap();
        for (a, b) in out.scores.iter().zip(&m.scores) {
            assert!((a - b).abs() < 1e-12);
        }
        assert_eq!(out.stage, Stage::Background);
    }

    #[test]
    fn aggregate_simplex_vertex_and_one_hot() {
        let maps: [SaliencyMap; 5] = core::array::from_fn(|k| {
            let mut s = vec![0.0; 6];
            s[k] = 1.0;
            map(s)
        });
        let vertex = aggregate(&maps, &TemplateWeights::new([1.0, 0.0, 0.0, 0.0, 0.0]).unwrap())
            .unwrap();
        assert_eq!(vertex.scores, maps[0].scores);
        let even = aggregate(&maps, &TemplateWeights::default()).unwrap();
        for k in 0..5 {
            assert!((even.scores[k] - 0.2).abs() < 1e-12);
        }
        assert_eq!(even.scores[5], 0.0);
    }

    #[test]
    fn aggregate_rejects_ragged_maps() {
        let mut maps: [SaliencyMap; 5] = core::array::from_fn(|_| map(vec![0.0; 3]));
        maps[4] = map(vec![0.0; 4]);
        assert!(matches!(
            aggregate(&maps, &TemplateWeights::default()),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn fit_recovers_exact_template() {
        // Ground truth equals template 3; the others live on disjoint pixels.
        let truth = vec![1.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0];
        let maps: [Vec<f64>; 5] = core::array::from_fn(|k| {
            if k == 2 {
                truth.clone()
            } else {
                let mut m = vec![0.0; 7];
                m[[2, 3, 0, 4, 5][k]] = 1.0;
                m
            }
        });
        let w = fit_weights(&[ValidationSample { maps, truth }]).unwrap().values();
        assert!((w[2] - 1.0).abs() < 1e-6, "{w:?}");
    }

    #[test]
    fn fit_ties_resolve_uniform() {
        let m = vec![0.2, 0.9, 0.4, 0.0];
        let truth = vec![0.0, 1.0, 1.0, 0.0];
        let sample = ValidationSample {
            maps: core::array::from_fn(|_| m.clone()),
            truth,
        };
        let w = fit_weights(&[sample]).unwrap().values();
        for v in w {
            assert!((v - 0.2).abs() < 1e-6, "{w:?}");
        }
    }

    #[test]
    fn fit_needs_samples() {
        assert_eq!(fit_weights(&[]).unwrap_err(), Error::EmptyValidationSet);
    }
}
