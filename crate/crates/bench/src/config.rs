//! Flat `key = value` run configuration.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use saliency_core::background::TemplateWeights;
use saliency_core::graph::DistanceScale;
use saliency_core::pixelgrid::Smoother;
use saliency_core::PipelineParams;

use crate::error::BenchError;

#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunConfig {
    pub params: PipelineParams,
    pub output_dir: Option<PathBuf>,
    pub export_stages: bool,
}


fn parse<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, BenchError> {
    value
        .parse()
        .map_err(|_| BenchError::Config(format!("bad value `{value}` for `{key}`")))
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, BenchError> {
        Self::parse_str(&std::fs::read_to_string(path)?)
    }

    /// Parses the text form. Unknown keys are errors; blank lines and lines
    /// starting with `#` are skipped.
    pub fn parse_str(text: &str) -> Result<Self, BenchError> {
        let mut cfg = RunConfig::default();
        let mut lambda = cfg.params.template_weights.values();
        let p = &mut cfg.params;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                BenchError::Config(format!("line {}: expected `key = value`", lineno + 1))
            })?;
            let (key, value) = (key.trim(), value.trim());
            match key {
                "superpixels" => p.slic.target_regions = parse(key, value)?,
                "compactness" => p.slic.compactness = parse(key, value)?,
                "slic_iterations" => p.slic.iterations = parse(key, value)?,
                "smoother" => {
                    p.smoother = Smoother::from_name(value).ok_or_else(|| {
                        BenchError::Config(format!("unknown smoother `{value}`"))
                    })?
                }
                "smooth_strength" => p.smooth_strength = parse(key, value)?,
                "sigma2" => p.graph.sigma2 = parse(key, value)?,
                "distance_scale" => {
                    p.graph.scale = DistanceScale::from_name(value).ok_or_else(|| {
                        BenchError::Config(format!("unknown distance_scale `{value}`"))
                    })?
                }
                "alpha1" => p.graph.distance.alpha1 = parse(key, value)?,
                "alpha2" => p.graph.distance.alpha2 = parse(key, value)?,
                "mu" => p.ranking.mu = parse(key, value)?,
                "threshold_a" => p.threshold.a = parse(key, value)?,
                "threshold_b" => p.threshold.b = parse(key, value)?,
                "threshold_c" => p.threshold.c = parse(key, value)?,
                "lambda1" => lambda[0] = parse(key, value)?,
                "lambda2" => lambda[1] = parse(key, value)?,
                "lambda3" => lambda[2] = parse(key, value)?,
                "lambda4" => lambda[3] = parse(key, value)?,
                "lambda5" => lambda[4] = parse(key, value)?,
                "gamma1" => p.refine.highlight.gamma1 = parse(key, value)?,
                "gamma2" => p.refine.highlight.gamma2 = parse(key, value)?,
                "k_clusters" => p.refine.highlight.k_clusters = parse(key, value)?,
                "kmeans_seed" => p.refine.highlight.kmeans_seed = parse(key, value)?,
                "max_iters" => p.refine.max_iters = parse(key, value)?,
                "refine_tolerance" => p.refine.tolerance = parse(key, value)?,
                "output_dir" => cfg.output_dir = Some(PathBuf::from(value)),
                "export_stages" => cfg.export_stages = parse(key, value)?,
                other => return Err(BenchError::Config(format!("unknown key `{other}`"))),
            }
        }
        p.template_weights = TemplateWeights::new(lambda)?;
        // a + b + c = 1 keeps the seed threshold inside the score range.
        p.threshold = p.threshold.normalized()?;
        p.validate()?;
        Ok(cfg)
    }

    /// Text form; floats use the shortest representation that parses back
    /// to the same value.
    pub fn to_text(&self) -> String {
        let p = &self.params;
        let l = p.template_weights.values();
        let mut s = String::new();
        let mut kv = |k: &str, v: String| {
            let _ = writeln!(s, "{k} = {v}");
        };
        kv("superpixels", p.slic.target_regions.to_string());
        kv("compactness", format!("{:?}", p.slic.compactness));
        kv("slic_iterations", p.slic.iterations.to_string());
        kv("smoother", p.smoother.name().into());
        kv("smooth_strength", format!("{:?}", p.smooth_strength));
        kv("sigma2", format!("{:?}", p.graph.sigma2));
        kv("distance_scale", p.graph.scale.name().into());
        kv("alpha1", format!("{:?}", p.graph.distance.alpha1));
        kv("alpha2", format!("{:?}", p.graph.distance.alpha2));
        kv("mu", format!("{:?}", p.ranking.mu));
        kv("threshold_a", format!("{:?}", p.threshold.a));
        kv("threshold_b", format!("{:?}", p.threshold.b));
        kv("threshold_c", format!("{:?}", p.threshold.c));
        for (k, v) in l.iter().enumerate() {
            kv(&format!("lambda{}", k + 1), format!("{v:?}"));
        }
        kv("gamma1", format!("{:?}", p.refine.highlight.gamma1));
        kv("gamma2", format!("{:?}", p.refine.highlight.gamma2));
        kv("k_clusters", p.refine.highlight.k_clusters.to_string());
        kv("kmeans_seed", p.refine.highlight.kmeans_seed.to_string());
        kv("max_iters", p.refine.max_iters.to_string());
        kv("refine_tolerance", format!("{:?}", p.refine.tolerance));
        if let Some(dir) = &self.output_dir {
            kv("output_dir", dir.display().to_string());
        }
        kv("export_stages", self.export_stages.to_string());
        s
    }

    pub fn save(&self, path: &Path) -> Result<(), BenchError> {
        std::fs::write(path, self.to_text())?;
        Ok(())
    }
}
