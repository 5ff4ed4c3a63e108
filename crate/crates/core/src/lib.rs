//! Unsupervised salient-object detection by manifold ranking against
//! complementary boundary templates.
//!
//! The pipeline runs in five stages over a superpixel graph:
//!
//! 1. pre-smoothing, CIELAB conversion and SLIC over-segmentation ([`pixelgrid`]);
//! 2. per-region colour + gradient-orientation descriptors ([`features`]) and
//!    the closed-loop affinity graph ([`graph`]);
//! 3. background maps ranked from five combinations of image borders and their
//!    weighted aggregate ([`background`], solved by [`ranking`]);
//! 4. foreground re-ranking from adaptively thresholded seeds ([`foreground`]);
//! 5. a centre-weighted decrease and a cluster-wise highlight ([`refine`]).
//!
//! [`metrics`] holds the benchmark measures used to score maps against
//! ground-truth masks.
//!
//! The crate is `no_std` and only needs `alloc`. Image decoding, file formats
//! and the command line live in the companion `saliency-bench` crate.
#![no_std]
#![forbid(unsafe_code)]
// `!(x > 0.0)` also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

mod error;
mod map;

pub mod background;
pub mod features;
pub mod foreground;
pub mod graph;
pub mod kmeans;
pub mod metrics;
pub mod pipeline;
pub mod pixelgrid;
pub mod ranking;
pub mod refine;

pub use self::error::Error;
pub use self::map::{SaliencyMap, Stage};
pub use self::pipeline::{PipelineParams, StageMaps};

pub type Result<T, E = Error> = core::result::Result<T, E>;
