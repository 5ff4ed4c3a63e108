use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("cannot read {path}: {reason}")]
    UnreadableFile { path: PathBuf, reason: String },
    #[error("{0}: only PNG and JPEG are supported")]
    UnsupportedFormat(PathBuf),
    #[error("{path}: image is {width}x{height}, both sides must be at least 16")]
    ImageTooSmall {
        path: PathBuf,
        width: usize,
        height: usize,
    },
    #[error("{path}: mask is {mask:?}, image is {image:?}")]
    MaskMismatch {
        path: PathBuf,
        mask: (usize, usize),
        image: (usize, usize),
    },
    #[error("config: {0}")]
    Config(String),
    #[error("no images found in {0}")]
    EmptyDataset(PathBuf),
    #[error("no validation images with masks found in {0}")]
    EmptyValidationSet(PathBuf),
    #[error(transparent)]
    Pipeline(#[from] saliency_core::Error),
    #[error(transparent)]
    Image(#[from] image::ImageError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
