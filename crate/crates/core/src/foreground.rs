//! Foreground seeding of the background map and re-ranking.

use crate::graph::AffinityGraph;
use crate::map::{SaliencyMap, Stage};
use crate::ranking::{normalize, QueryVector, Ranker};
use crate::{Error, Result};

/// Coefficients of `T = a min + b max + c mean`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThresholdParams {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl Default for ThresholdParams {
    fn default() -> Self {
        Self {
            a: 0.025,
            b: 0.95,
            c: 0.025,
        }
    }
}

impl ThresholdParams {
    /// Rescales the coefficients to sum to one, which keeps `T` inside the
    /// score range.
    pub fn normalized(self) -> Result<Self> {
        let Self { a, b, c } = self;
        if a < 0.0 || b < 0.0 || c < 0.0 {
            return Err(Error::InvalidParameter("threshold coefficients must be non-negative"));
        }
        let total = a + b + c;
        if !(total > 0.0) || !total.is_finite() {
            return Err(Error::InvalidParameter("threshold coefficients must not all be zero"));
        }
        if (total - 1.0).abs() <= 4.0 * f64::EPSILON {
            return Ok(self);
        }
        Ok(Self {
            a: a / total,
            b: b / total,
            c: c / total,
        })
    }
}

pub fn adaptive_threshold(m: &SaliencyMap, p: &ThresholdParams) -> f64 {
    p.a * m.min() + p.b * m.max() + p.c * m.mean()
}

/// Ranks every node against the regions scoring at least `T` in `bbm`.
pub fn foreground_map(
    ranker: &Ranker,
    bbm: &SaliencyMap,
    p: &ThresholdParams,
) -> Result<SaliencyMap> {
    if bbm.region_count() != ranker.node_count() {
        return Err(Error::DimensionMismatch {
            expected: ranker.node_count(),
            actual: bbm.region_count(),
        });
    }
    let t = adaptive_threshold(bbm, p);
    // Inclusive, so the maximum always seeds.
    let seeds = QueryVector::from_flags(bbm.scores.iter().map(|&s| s >= t).collect());
    debug_assert!(seeds.count() > 0, "the maximum score is always a seed");
    let f = ranker.rank(&seeds)?;
    Ok(SaliencyMap::new(
        normalize(f.values()),
        Stage::Foreground,
        bbm.width,
        bbm.height,
    ))
}

/// Convenience wrapper that factors the graph first.
pub fn foreground_map_for_graph(
    g: &AffinityGraph,
    bbm: &SaliencyMap,
    p: &ThresholdParams,
    rp: &crate::ranking::RankingParams,
) -> Result<SaliencyMap> {
    foreground_map(&Ranker::new(g, rp)?, bbm, p)
}
