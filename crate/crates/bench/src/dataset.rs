//! Dataset discovery and batch execution.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use log::{info, warn};
use rayon::prelude::*;
use saliency_core::background::{fit_weights, TemplateWeights};
use saliency_core::metrics::{evaluate, BinaryMask, MetricReport};
use saliency_core::pipeline::{run, StageMaps};

use crate::config::RunConfig;
use crate::error::BenchError;
use crate::io::{load_image, load_map, load_mask, save_map};
use crate::report::{write_curves_csv, write_metrics_csv};

const IMAGE_EXTENSIONS: [&str; 3] = ["png", "jpg", "jpeg"];

/// An image and, optionally, its ground-truth mask.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DatasetEntry {
    pub image: PathBuf,
    pub mask: Option<PathBuf>,
}

impl DatasetEntry {
    pub fn stem(&self) -> String {
        file_stem(&self.image)
    }
}

fn file_stem(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default()
}

fn is_image(path: &Path) -> bool {
    path.is_file()
        && path
            .extension()
            .and_then(|e| e.to_str())
            .is_some_and(|e| IMAGE_EXTENSIONS.contains(&e.to_ascii_lowercase().as_str()))
}

/// Image files in `dir` keyed (and therefore ordered) by file stem.
fn images_by_stem(dir: &Path) -> Result<BTreeMap<String, PathBuf>, BenchError> {
    let mut out = BTreeMap::new();
    for entry in std::fs::read_dir(dir)? {
        let path = entry?.path();
        if is_image(&path) {
            out.insert(file_stem(&path), path);
        }
    }
    Ok(out)
}

/// Finds the images under `root`, paired with masks by file stem.
///
/// `root` may be a single image file, a directory of images, or a directory
/// holding `images/` and `masks/` (the layout written by `synth`). Masks are
/// looked up in `gt` when given, else in `root/masks` when it exists.
pub fn discover(root: &Path, gt: Option<&Path>) -> Result<Vec<DatasetEntry>, BenchError> {
    if root.is_file() {
        let mask = match gt {
            Some(dir) => images_by_stem(dir)?.remove(&file_stem(root)),
            None => None,
        };
        return Ok(vec![DatasetEntry {
            image: root.to_path_buf(),
            mask,
        }]);
    }
    let image_dir = if root.join("images").is_dir() {
        root.join("images")
    } else {
        root.to_path_buf()
    };
    let mask_dir = match gt {
        Some(dir) => Some(dir.to_path_buf()),
        None => Some(root.join("masks")).filter(|d| d.is_dir()),
    };
    let mut masks = match &mask_dir {
        Some(dir) => images_by_stem(dir)?,
        None => BTreeMap::new(),
    };
    let entries: Vec<DatasetEntry> = images_by_stem(&image_dir)?
        .into_iter()
        .map(|(stem, image)| DatasetEntry {
            mask: masks.remove(&stem),
            image,
        })
        .collect();
    if entries.is_empty() {
        return Err(BenchError::EmptyDataset(root.to_path_buf()));
    }
    Ok(entries)
}

/// Result of one image.
#[derive(Debug, Clone)]
pub struct ImageOutcome {
    pub stem: String,
    pub width: usize,
    pub height: usize,
    pub final_pixels: Vec<f64>,
    pub report: Option<MetricReport>,
}

/// Runs the pipeline on one entry, writes `<stem>_final.png` (plus every
/// stage when exporting) into `out`, and scores it when a mask exists.
pub fn run_image(
    cfg: &RunConfig,
    entry: &DatasetEntry,
    out: &Path,
    dump_graph: bool,
) -> Result<ImageOutcome, BenchError> {
    let img = load_image(&entry.image)?;
    let (w, h) = (img.width(), img.height());
    let mask = entry
        .mask
        .as_deref()
        .map(|m| load_checked_mask(m, w, h))
        .transpose()?;
    let stages = run(&img, &cfg.params)?;
    let stem = entry.stem();

    let final_pixels = stages.final_map.render(&stages.superpixels);
    save_map(&out.join(format!("{stem}_final.png")), w, h, &final_pixels)?;
    if cfg.export_stages {
        export_stages(&stages, &stem, out)?;
    }
    if dump_graph {
        write_graph(&stages, &out.join(format!("{stem}_graph.txt")))?;
    }
    let report = mask.map(|m| evaluate(&final_pixels, &m)).transpose()?;
    Ok(ImageOutcome {
        stem,
        width: w,
        height: h,
        final_pixels,
        report,
    })
}

fn load_checked_mask(path: &Path, w: usize, h: usize) -> Result<BinaryMask, BenchError> {
    let mask = load_mask(path)?;
    if (mask.width(), mask.height()) != (w, h) {
        return Err(BenchError::MaskMismatch {
            path: path.to_path_buf(),
            mask: (mask.width(), mask.height()),
            image: (w, h),
        });
    }
    Ok(mask)
}

fn export_stages(stages: &StageMaps, stem: &str, out: &Path) -> Result<(), BenchError> {
    let sp = &stages.superpixels;
    for map in stages.all_maps() {
        let path = out.join(format!("{stem}_{}.png", map.stage.name()));
        save_map(&path, sp.width(), sp.height(), &map.render(sp))?;
    }
    Ok(())
}

/// Plain-text `i j w` triplets of the affinity graph.
fn write_graph(stages: &StageMaps, path: &Path) -> Result<(), BenchError> {
    let mut f = BufWriter::new(File::create(path)?);
    for (i, j, w) in stages.graph.triplets() {
        writeln!(f, "{i} {j} {w:e}")?;
    }
    f.flush()?;
    Ok(())
}

/// Outcome of a batch.
#[derive(Debug, Clone)]
pub struct DatasetReport {
    pub rows: Vec<(String, MetricReport)>,
    pub unscored: Vec<String>,
    pub failures: Vec<(String, String)>,
    pub aggregate: Option<MetricReport>,
}

/// Runs every entry (in parallel, reported in filename order). Failing images
/// are logged and skipped. When any entry is scored, writes `metrics.csv`
/// and `curves.csv` into `out`.
pub fn run_dataset(
    cfg: &RunConfig,
    entries: &[DatasetEntry],
    out: &Path,
    dump_graph: bool,
) -> Result<DatasetReport, BenchError> {
    if entries.is_empty() {
        return Err(BenchError::EmptyDataset(out.to_path_buf()));
    }
    std::fs::create_dir_all(out)?;
    let outcomes: Vec<_> = entries
        .par_iter()
        .map(|e| (e.stem(), run_image(cfg, e, out, dump_graph)))
        .collect();

    let mut report = DatasetReport {
        rows: Vec::new(),
        unscored: Vec::new(),
        failures: Vec::new(),
        aggregate: None,
    };
    for (stem, outcome) in outcomes {
        match outcome {
            Ok(ImageOutcome {
                report: Some(r), ..
            }) => report.rows.push((stem, r)),
            Ok(_) => report.unscored.push(stem),
            Err(e) => {
                warn!("skipping {stem}: {e}");
                report.failures.push((stem, e.to_string()));
            }
        }
    }
    let scored: Vec<MetricReport> = report.rows.iter().map(|(_, r)| r.clone()).collect();
    report.aggregate = MetricReport::mean(&scored);
    if let Some(agg) = &report.aggregate {
        write_metrics_csv(&out.join("metrics.csv"), &report.rows, agg)?;
        write_curves_csv(&out.join("curves.csv"), agg)?;
    }
    info!(
        "{} scored, {} without mask, {} failed",
        report.rows.len(),
        report.unscored.len(),
        report.failures.len()
    );
    Ok(report)
}

/// Fits the template weights over every masked entry under `dir` and
/// returns them. Entries that fail are logged and left out.
pub fn calibrate(cfg: &RunConfig, dir: &Path) -> Result<TemplateWeights, BenchError> {
    let entries: Vec<DatasetEntry> = match discover(dir, None) {
        Ok(e) => e.into_iter().filter(|e| e.mask.is_some()).collect(),
        Err(BenchError::EmptyDataset(_)) => Vec::new(),
        Err(e) => return Err(e),
    };
    let samples: Vec<_> = entries
        .par_iter()
        .filter_map(|e| {
            let sample = (|| -> Result<_, BenchError> {
                let img = load_image(&e.image)?;
                let mask = load_checked_mask(e.mask.as_deref().expect("filtered"), img.width(), img.height())?;
                let stages = run(&img, &cfg.params)?;
                Ok(stages.validation_sample(mask.to_reals()))
            })();
            sample
                .map_err(|err| warn!("skipping {}: {err}", e.stem()))
                .ok()
        })
        .collect();
    if samples.is_empty() {
        return Err(BenchError::EmptyValidationSet(dir.to_path_buf()));
    }
    Ok(fit_weights(&samples)?)
}

/// Scores existing maps against masks. A map `<stem>.png` or
/// `<stem>_final.png` pairs with mask `<stem>.png`.
pub fn eval_dir(saliency_dir: &Path, gt_dir: &Path) -> Result<Vec<(String, MetricReport)>, BenchError> {
    let masks = images_by_stem(gt_dir)?;
    let mut rows = Vec::new();
    for (stem, path) in images_by_stem(saliency_dir)? {
        let key = stem.strip_suffix("_final").unwrap_or(&stem).to_string();
        let Some(mask_path) = masks.get(&key) else {
            continue;
        };
        let (w, h, map) = load_map(&path)?;
        let mask = load_checked_mask(mask_path, w, h)?;
        rows.push((key, evaluate(&map, &mask)?));
    }
    if rows.is_empty() {
        return Err(BenchError::EmptyDataset(saliency_dir.to_path_buf()));
    }
    Ok(rows)
}
