use alloc::vec::Vec;

use crate::pixelgrid::SuperpixelMap;

/// Pipeline stage that produced a [`SaliencyMap`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Stage {
    /// Background map from template 1..=5.
    Template(u8),
    Background,
    Foreground,
    Decreased,
    Final,
}

impl Stage {
    /// Short name used in exported file names.
    pub fn name(self) -> &'static str {
        match self {
            Stage::Template(1) => "sb1",
            Stage::Template(2) => "sb2",
            Stage::Template(3) => "sb3",
            Stage::Template(4) => "sb4",
            Stage::Template(_) => "sb5",
            Stage::Background => "bbm",
            Stage::Foreground => "fbm",
            Stage::Decreased => "dec",
            Stage::Final => "final",
        }
    }
}

/// Per-region saliency in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SaliencyMap {
    pub scores: Vec<f64>,
    pub stage: Stage,
    pub width: usize,
    pub height: usize,
}

impl SaliencyMap {
    pub fn new(scores: Vec<f64>, stage: Stage, width: usize, height: usize) -> Self {
        Self {
            scores,
            stage,
            width,
            height,
        }
    }

    pub fn region_count(&self) -> usize {
        self.scores.len()
    }

    pub fn with_stage(mut self, stage: Stage) -> Self {
        self.stage = stage;
        self
    }

    /// Pixel-resolution view: each pixel takes its region's score.
    pub fn render(&self, sp: &SuperpixelMap) -> Vec<f64> {
        sp.render(&self.scores)
    }

    pub fn min(&self) -> f64 {
        self.scores.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.scores.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn mean(&self) -> f64 {
        self.scores.iter().sum::<f64>() / self.scores.len() as f64
    }
}
