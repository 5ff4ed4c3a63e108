//! File formats, dataset handling and the command-line harness around
//! `saliency-core`.

pub mod config;
pub mod dataset;
pub mod error;
pub mod io;
pub mod report;
pub mod synth;

pub use self::config::RunConfig;
pub use self::dataset::{calibrate, discover, eval_dir, run_dataset, run_image, DatasetEntry};
pub use self::error::BenchError;
