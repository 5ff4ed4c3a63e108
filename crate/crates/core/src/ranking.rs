//! Manifold ranking: relevance of every node to a set of query nodes,
//! `f = (D - alpha W)^-1 y` with `alpha = 1 / (1 + mu)`.
//!
//! `D - alpha W` is symmetric and strictly diagonally dominant on any graph
//! without isolated nodes, so a dense Cholesky factorisation always
//! succeeds. The factor is computed once per graph and reused for every
//! query vector.

use alloc::vec;
use alloc::vec::Vec;

use crate::graph::AffinityGraph;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RankingParams {
    pub mu: f64,
}

impl Default for RankingParams {
    fn default() -> Self {
        Self { mu: 0.01 }
    }
}

impl RankingParams {
    pub fn alpha(&self) -> f64 {
        1.0 / (1.0 + self.mu)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.mu > 0.0) || !self.mu.is_finite() {
            return Err(Error::InvalidParameter("mu must be positive"));
        }
        Ok(())
    }
}

/// Indicator vector of query nodes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QueryVector(Vec<bool>);

impl QueryVector {
    pub fn empty(n: usize) -> Self {
        Self(vec![false; n])
    }

    pub fn from_indices(n: usize, nodes: impl IntoIterator<Item = usize>) -> Self {
        let mut q = Self::empty(n);
        for i in nodes {
            q.0[i] = true;
        }
        q
    }

    pub fn from_flags(flags: Vec<bool>) -> Self {
        Self(flags)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn count(&self) -> usize {
        self.0.iter().filter(|&&b| b).count()
    }

    pub fn contains(&self, i: usize) -> bool {
        self.0[i]
    }

    pub fn as_reals(&self) -> Vec<f64> {
        self.0.iter().map(|&b| if b { 1.0 } else { 0.0 }).collect()
    }
}

/// Raw ranking scores.
#[derive(Debug, Clone, PartialEq)]
pub struct RankVector(pub Vec<f64>);

impl RankVector {
    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn normalized(&self) -> Vec<f64> {
        normalize(&self.0)
    }
}

/// Spreads below this fraction of the largest magnitude count as rounding
/// noise around a constant.
const FLAT_SPREAD: f64 = 1e-12;

/// Affine rescale to `[0, 1]`; a constant vector maps to all zeros.
pub fn normalize(values: &[f64]) -> Vec<f64> {
    let (lo, hi) = values
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
            (lo.min(v), hi.max(v))
        });
    let span = hi - lo;
    if !(span > FLAT_SPREAD * lo.abs().max(hi.abs())) {
        return vec![0.0; values.len()];
    }
    values.iter().map(|&v| (v - lo) / span).collect()
}

/// Cholesky factor of `D - alpha W` for one graph.
#[derive(Debug, Clone)]
pub struct Ranker {
    n: usize,
    // system matrix, kept for residual refinement
    system: Vec<f64>,
    // lower-triangular factor, row-major
    factor: Vec<f64>,
}

impl Ranker {
    pub fn new(g: &AffinityGraph, p: &RankingParams) -> Result<Self> {
        p.validate()?;
        let n = g.node_count();
        let alpha = p.alpha();
        let mut system = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                system[i * n + j] = -alpha * g.weight(i, j);
            }
            system[i * n + i] += g.degrees()[i];
        }
        let factor = cholesky(&system, n)?;
        Ok(Self { n, system, factor })
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    /// Solves `(D - alpha W) f = y`, with one round of iterative refinement.
    pub fn rank(&self, q: &QueryVector) -> Result<RankVector> {
        if q.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                actual: q.len(),
            });
        }
        let y = q.as_reals();
        let mut f = self.solve(&y);
        let residual: Vec<f64> = (0..self.n)
            .map(|i| {
                let row = &self.system[i * self.n..(i + 1) * self.n];
                y[i] - row.iter().zip(&f).map(|(a, b)| a * b).sum::<f64>()
            })
            .collect();
        let correction = self.solve(&residual);
        for (v, c) in f.iter_mut().zip(correction) {
            *v += c;
        }
        if f.iter().any(|v| !v.is_finite()) {
            return Err(Error::SingularSystem);
        }
        Ok(RankVector(f))
    }

    fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.n;
        let l = &self.factor;
        let mut z = vec![0.0; n];
        for i in 0..n {
            let s: f64 = (0..i).map(|k| l[i * n + k] * z[k]).sum();
            z[i] = (b[i] - s) / l[i * n + i];
        }
        let mut x = vec![0.0; n];
        for i in (0..n).rev() {
            let s: f64 = (i + 1..n).map(|k| l[k * n + i] * x[k]).sum();
            x[i] = (z[i] - s) / l[i * n + i];
        }
        x
    }
}

fn cholesky(a: &[f64], n: usize) -> Result<Vec<f64>> {
    let mut l = vec![0.0; n * n];
    for j in 0..n {
        let mut d = a[j * n + j];
        for k in 0..j {
            d -= l[j * n + k] * l[j * n + k];
        }
        if !(d > 0.0) || !d.is_finite() {
            return Err(Error::SingularSystem);
        }
        let d = libm::sqrt(d);
        l[j * n + j] = d;
        for i in j + 1..n {
            let mut s = a[i * n + j];
            for k in 0..j {
                s -= l[i * n + k] * l[j * n + k];
            }
            l[i * n + j] = s / d;
        }
    }
    Ok(l)
}

/// One-shot ranking; prefer [`Ranker`] when several query vectors share a graph.
pub fn rank(g: &AffinityGraph, q: &QueryVector, p: &RankingParams) -> Result<RankVector> {
    Ranker::new(g, p)?.rank(q)
}
