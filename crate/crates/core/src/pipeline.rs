//! End-to-end orchestration of every stage for a single image.

use alloc::vec::Vec;

use crate::background::{aggregate, SideRankings, TemplateWeights, ValidationSample};
use crate::features::{extract_descriptors, RegionDescriptor};
use crate::foreground::{foreground_map, ThresholdParams};
use crate::graph::{build_graph, AffinityGraph, GraphParams};
use crate::map::SaliencyMap;
use crate::pixelgrid::{slic, to_lab, RasterImage, SlicParams, Smoother, SuperpixelMap};
use crate::ranking::{Ranker, RankingParams};
use crate::refine::{refine_pipeline, FeatureKernel, RefineParams};
use crate::{Error, Result};

/// Every tunable of the pipeline.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PipelineParams {
    pub smoother: Smoother,
    pub smooth_strength: f64,
    pub slic: SlicParams,
    pub graph: GraphParams,
    pub ranking: RankingParams,
    pub threshold: ThresholdParams,
    pub template_weights: TemplateWeights,
    pub refine: RefineParams,
}

impl Default for PipelineParams {
    fn default() -> Self {
        Self {
            smoother: Smoother::default(),
            smooth_strength: 0.02,
            slic: SlicParams::default(),
            graph: GraphParams::default(),
            ranking: RankingParams::default(),
            threshold: ThresholdParams::default(),
            template_weights: TemplateWeights::default(),
            refine: RefineParams::default(),
        }
    }
}

impl PipelineParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.smooth_strength >= 0.0) {
            return Err(Error::InvalidParameter("smooth_strength must be non-negative"));
        }
        if self.slic.compactness <= 0.0 {
            return Err(Error::InvalidParameter("compactness must be positive"));
        }
        self.graph.validate()?;
        self.ranking.validate()?;
        self.threshold.normalized()?;
        self.refine.highlight.validate()
    }
}

/// Intermediate and final results of one run.
#[derive(Debug, Clone)]
pub struct StageMaps {
    pub superpixels: SuperpixelMap,
    pub descriptors: Vec<RegionDescriptor>,
    pub graph: AffinityGraph,
    pub templates: [SaliencyMap; 5],
    pub background: SaliencyMap,
    pub foreground: SaliencyMap,
    pub decreased: SaliencyMap,
    /// Decrease stage at pixel resolution, before region averaging.
    pub decreased_pixels: Vec<f64>,
    pub final_map: SaliencyMap,
    pub refine_iterations: usize,
}

impl StageMaps {
    /// Every region-level map in pipeline order.
    pub fn all_maps(&self) -> impl Iterator<Item = &SaliencyMap> {
        self.templates.iter().chain([
            &self.background,
            &self.foreground,
            &self.decreased,
            &self.final_map,
        ])
    }

    /// Pixel-level template maps paired with a ground truth, for weight fitting.
    pub fn validation_sample(&self, truth: Vec<f64>) -> ValidationSample {
        ValidationSample {
            maps: core::array::from_fn(|k| self.templates[k].render(&self.superpixels)),
            truth,
        }
    }
}

pub fn run(img: &RasterImage, params: &PipelineParams) -> Result<StageMaps> {
    params.validate()?;
    let threshold = params.threshold.normalized()?;
    let (w, h) = (img.width(), img.height());

    let smoothed = params.smoother.apply(img, params.smooth_strength);
    let lab = to_lab(&smoothed);
    let superpixels = slic(&lab, &params.slic)?;
    let descriptors = extract_descriptors(&lab, &superpixels)?;
    let graph = build_graph(&superpixels, &descriptors, &params.graph)?;
    let ranker = Ranker::new(&graph, &params.ranking)?;

    let sides = SideRankings::compute(&graph, &ranker, w, h)?;
    let templates = sides.all_templates()?;
    let background = aggregate(&templates, &params.template_weights)?;
    let foreground = foreground_map(&ranker, &background, &threshold)?;

    let kernel = FeatureKernel::from_graph(&graph, &params.graph);
    let mut refine = params.refine;
    refine.highlight.k_clusters = refine.highlight.k_clusters.min(superpixels.region_count());
    let refined = refine_pipeline(&foreground, &superpixels, &descriptors, &refine, &kernel)?;

    Ok(StageMaps {
        superpixels,
        descriptors,
        graph,
        templates,
        background,
        foreground,
        decreased: refined.decreased,
        decreased_pixels: refined.decreased_pixels,
        final_map: refined.final_map,
        refine_iterations: refined.iterations,
    })
}
