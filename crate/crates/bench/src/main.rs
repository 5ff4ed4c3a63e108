use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use saliency_bench::report::metrics_csv;
use saliency_bench::synth::{self, SynthKind};
use saliency_bench::{calibrate, discover, eval_dir, run_dataset, RunConfig};
use saliency_core::metrics::MetricReport;

#[derive(Parser)]
#[command(name = "saliency", version, about = "Boundary-template saliency detection and benchmarking")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute saliency maps for an image or a directory of images.
    Run {
        input: PathBuf,
        #[arg(long)]
        config: Option<PathBuf>,
        /// Output directory (defaults to `output_dir` from the config).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write every intermediate stage map.
        #[arg(long)]
        export_stages: bool,
        /// Directory of ground-truth masks, matched by file stem.
        #[arg(long)]
        gt: Option<PathBuf>,
        /// Write the affinity graph of each image as `i j w` triplets.
        #[arg(long)]
        dump_graph: bool,
    },
    /// Fit the template weights on a validation set and store them in the config.
    Calibrate {
        dir: PathBuf,
        #[arg(long)]
        config: PathBuf,
    },
    /// Generate synthetic images with ground-truth masks.
    Synth {
        kind: SynthKind,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        count: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Score existing saliency maps against ground-truth masks.
    Eval {
        saliency_dir: PathBuf,
        gt_dir: PathBuf,
        /// Write the CSV here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn load_config(path: Option<&PathBuf>) -> Result<RunConfig> {
    match path {
        Some(p) => RunConfig::load(p).with_context(|| format!("loading {}", p.display())),
        None => Ok(RunConfig::default()),
    }
}

fn main() -> Result<()> {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    match Cli::parse().command {
        Command::Run {
            input,
            config,
            out,
            export_stages,
            gt,
            dump_graph,
        } => {
            let mut cfg = load_config(config.as_ref())?;
            cfg.export_stages |= export_stages;
            let out = out
                .or_else(|| cfg.output_dir.clone())
                .context("no output directory: pass --out or set output_dir")?;
            let entries = discover(&input, gt.as_deref())?;
            let report = run_dataset(&cfg, &entries, &out, dump_graph)?;
            if let Some(agg) = &report.aggregate {
                println!(
                    "{} images: F={:.4} AUC={:.4} MAE={:.4} OR={:.4}",
                    report.rows.len(),
                    agg.f_measure,
                    agg.auc,
                    agg.mae,
                    agg.or_score
                );
            }
            if !report.failures.is_empty() {
                eprintln!("{} image(s) failed", report.failures.len());
            }
        }
        Command::Calibrate { dir, config } => {
            let mut cfg = if config.exists() {
                load_config(Some(&config))?
            } else {
                RunConfig::default()
            };
            let weights = calibrate(&cfg, &dir)?;
            cfg.params.template_weights = weights;
            cfg.save(&config)?;
            println!("lambda = {:?}", weights.values());
        }
        Command::Synth {
            kind,
            seed,
            count,
            out,
        } => {
            let entries = synth::write(kind, seed, count, &out)?;
            println!("wrote {} image(s) to {}", entries.len(), out.display());
        }
        Command::Eval {
            saliency_dir,
            gt_dir,
            out,
        } => {
            let rows = eval_dir(&saliency_dir, &gt_dir)?;
            let reports: Vec<MetricReport> = rows.iter().map(|(_, r)| r.clone()).collect();
            let agg = MetricReport::mean(&reports).expect("non-empty");
            let csv = metrics_csv(&rows, &agg);
            match out {
                Some(path) => std::fs::write(path, csv)?,
                None => print!("{csv}"),
            }
        }
    }
    Ok(())
}
