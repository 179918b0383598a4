//! Fast multilevel thresholding of 8-bit grayscale images.
//!
//! The core algorithm walks inward from both ends of the intensity histogram.
//! At each step it computes the mean and standard deviation of the current
//! sub-range, cuts off the tails beyond `mean ± kappa * std`, and recurses on
//! what is left. The residual range is finally split at its mean. Every class
//! is replaced by its histogram-weighted mean, so the quantized image can be
//! produced with a single 256-entry lookup table.
//!
//! Alongside the segmenter the crate ships:
//! - PGM (P2/P5) reading and writing,
//! - MSE / PSNR quality metrics and a small timing harness,
//! - Otsu bi-level and exhaustive multilevel baselines,
//! - automatic selection of the threshold count from PSNR saturation,
//! - the `recthresh` command-line front end (see [`cli`]).
//!
//! Data-parallel loops (histogram, lookup-table mapping, MSE, candidate
//! sweeps, exhaustive Otsu search) use rayon when the `parallel` feature is
//! enabled, which it is by default. Every entry point has a `*_with` variant
//! taking an [`Exec`] so callers can force the sequential path; results are
//! identical either way.

pub mod baselines;
pub mod cli;
mod error;
mod exec;
pub mod image;
pub mod metrics;
pub mod pgm;
pub mod report;
pub mod stats;
pub mod thresholder;

pub use baselines::{
    between_class_variance, otsu_bilevel, otsu_multilevel_exhaustive,
    otsu_multilevel_exhaustive_with, OtsuResult,
};
pub use error::{Error, Result};
pub use exec::Exec;
pub use image::{compute_histogram, GrayImage, Histogram, LEVELS};
pub use metrics::{mse, psnr, timed, Psnr, QualityReport};
pub use pgm::{read_pgm, write_pgm};
pub use stats::{midpoint, range_stats, weighted_mean, RangeStats, SubRange};
pub use thresholder::{
    apply_mapping, auto_select_n, segment, step_thresholds, Class, KappaPair, Replacement,
    SegmentationParams, SegmentationResult, Selection, Step, SweepPoint,
};
