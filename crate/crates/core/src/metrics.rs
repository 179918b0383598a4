//! Reconstruction quality (MSE, PSNR) and wall-clock measurement.

use std::time::Instant;

#[cfg(feature = "parallel")]
use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::exec::{Exec, PIXEL_CHUNK};
use crate::thresholder::SegmentationParams;
use crate::{GrayImage, Result};

/// Peak signal value for 8-bit images.
pub const PEAK: f64 = 255.0;

/// Peak signal-to-noise ratio in decibels.
///
/// Identical images have no noise; that case is the explicit `Infinite`
/// variant rather than an overflowed float. Serialized as a JSON number, or
/// the string `"inf"`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Psnr {
    Db(f64),
    Infinite,
}

impl Psnr {
    pub fn from_mse(mse: f64) -> Psnr {
        if mse == 0.0 {
            Psnr::Infinite
        } else {
            Psnr::Db(10.0 * (PEAK * PEAK / mse).log10())
        }
    }

    /// Decibel value, `f64::INFINITY` for the infinite case.
    pub fn db(self) -> f64 {
        match self {
            Psnr::Db(v) => v,
            Psnr::Infinite => f64::INFINITY,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Psnr::Infinite)
    }
}

impl PartialOrd for Psnr {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        self.db().partial_cmp(&other.db())
    }
}

impl std::fmt::Display for Psnr {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Psnr::Db(v) => match f.precision() {
                Some(p) => write!(f, "{v:.p$}"),
                None => write!(f, "{v}"),
            },
            Psnr::Infinite => f.write_str("inf"),
        }
    }
}

impl Serialize for Psnr {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Psnr::Db(v) => s.serialize_f64(*v),
            Psnr::Infinite => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Psnr {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Number(f64),
            Text(String),
        }
        match Repr::deserialize(d)? {
            Repr::Number(v) if v.is_finite() => Ok(Psnr::Db(v)),
            Repr::Text(t) if t == "inf" => Ok(Psnr::Infinite),
            _ => Err(serde::de::Error::custom(
                "expected a finite number or \"inf\"",
            )),
        }
    }
}

/// Mean squared error between two equally sized images.
pub fn mse(a: &GrayImage, b: &GrayImage) -> Result<f64> {
    mse_with(a, b, Exec::default())
}

pub fn mse_with(a: &GrayImage, b: &GrayImage, exec: Exec) -> Result<f64> {
    a.same_dimensions(b)?;
    let sse = |(x, y): (&[u8], &[u8])| -> u64 {
        x.iter()
            .zip(y)
            .map(|(&p, &q)| {
                let d = p.abs_diff(q) as u64;
                d * d
            })
            .sum()
    };
    let total: u64 = if exec.is_parallel() {
        #[cfg(feature = "parallel")]
        {
            a.pixels()
                .par_chunks(PIXEL_CHUNK)
                .zip(b.pixels().par_chunks(PIXEL_CHUNK))
                .map(sse)
                .sum()
        }
        #[cfg(not(feature = "parallel"))]
        unreachable!()
    } else {
        a.pixels()
            .chunks(PIXEL_CHUNK)
            .zip(b.pixels().chunks(PIXEL_CHUNK))
            .map(sse)
            .sum()
    };
    Ok(total as f64 / a.len() as f64)
}

pub fn psnr(a: &GrayImage, b: &GrayImage) -> Result<Psnr> {
    Ok(Psnr::from_mse(mse(a, b)?))
}

/// Runs `op` once and returns its result with the elapsed wall time in
/// milliseconds, measured on the monotonic clock.
pub fn timed<T>(op: impl FnOnce() -> T) -> (T, f64) {
    let start = Instant::now();
    let out = op();
    (out, start.elapsed().as_secs_f64() * 1e3)
}

/// One warm-up call followed by `runs` timed calls; returns the last result
/// and the median elapsed milliseconds.
pub fn median_timed<T>(runs: usize, mut op: impl FnMut() -> T) -> (T, f64) {
    let mut out = std::hint::black_box(op());
    let mut samples = Vec::with_capacity(runs.max(1));
    for _ in 0..runs.max(1) {
        let (o, ms) = timed(&mut op);
        out = std::hint::black_box(o);
        samples.push(ms);
    }
    (out, median(&mut samples))
}

pub fn median(samples: &mut [f64]) -> f64 {
    assert!(!samples.is_empty(), "median of no samples");
    samples.sort_by(f64::total_cmp);
    let mid = samples.len() / 2;
    if samples.len() % 2 == 1 {
        samples[mid]
    } else {
        (samples[mid - 1] + samples[mid]) / 2.0
    }
}

/// Quality and cost of one segmentation run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QualityReport {
    pub mse: f64,
    pub psnr_db: Psnr,
    pub elapsed_ms: f64,
    pub params: SegmentationParams,
}

impl QualityReport {
    pub fn new(
        original: &GrayImage,
        quantized: &GrayImage,
        elapsed_ms: f64,
        params: SegmentationParams,
    ) -> Result<Self> {
        let mse = mse(original, quantized)?;
        Ok(Self {
            mse,
            psnr_db: Psnr::from_mse(mse),
            elapsed_ms,
            params,
        })
    }
}
