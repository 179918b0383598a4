//! Recursive mean/standard-deviation multilevel thresholding.
//!
//! Starting from the full range `[0, 255]`, each iteration computes the mean
//! `mu` and standard deviation `sigma` of the pixels inside the current range
//! `[a, b]`, places two cuts at `T1 = mu - k1*sigma` and `T2 = mu + k2*sigma`,
//! emits the outer classes `[a, T1]` and `[T2, b]`, and continues on
//! `[T1 + 1, T2 - 1]`. After `(n - 1) / 2` iterations the residual range is
//! split once more at its rounded mean, which becomes the middle threshold.
//! The result therefore has `n` thresholds and `n + 1` classes.
//!
//! Each iteration touches at most 256 histogram bins, so after the histogram
//! is built the whole procedure is `O(256 * n)` regardless of image size.

#[cfg(feature = "parallel")]
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::metrics::Psnr;
use crate::stats::{midpoint, Moments, RangeStats, SubRange};
use crate::{Error, Exec, GrayImage, Histogram, Result, LEVELS};

/// Multipliers on `sigma` for the lower and upper cut of one iteration.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct KappaPair {
    pub lower: f64,
    pub upper: f64,
}

impl KappaPair {
    pub fn symmetric(kappa: f64) -> Self {
        Self {
            lower: kappa,
            upper: kappa,
        }
    }

    fn validate(self) -> Result<Self> {
        let ok = |k: f64| k.is_finite() && k > 0.0;
        if ok(self.lower) && ok(self.upper) {
            Ok(self)
        } else {
            Err(Error::InvalidParameter(format!(
                "kappa values must be finite and positive, got {}:{}",
                self.lower, self.upper
            )))
        }
    }
}

impl Default for KappaPair {
    fn default() -> Self {
        Self::symmetric(1.0)
    }
}

/// Value assigned to every pixel of a class.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Replacement {
    /// Histogram-weighted mean of the class, rounded half-up.
    #[default]
    WeightedMean,
    /// Middle level of the class interval.
    Midpoint,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawParams")]
pub struct SegmentationParams {
    n: usize,
    kappa_schedule: Vec<KappaPair>,
    replacement: Replacement,
}

#[derive(Deserialize)]
struct RawParams {
    n: usize,
    kappa_schedule: Vec<KappaPair>,
    replacement: Replacement,
}

impl TryFrom<RawParams> for SegmentationParams {
    type Error = Error;

    fn try_from(raw: RawParams) -> Result<Self> {
        Ok(SegmentationParams::new(raw.n)?
            .with_kappa_schedule(raw.kappa_schedule)?
            .with_replacement(raw.replacement))
    }
}

impl SegmentationParams {
    /// `n` thresholds with `kappa = 1` at every step and weighted-mean
    /// replacement. `n` must be odd and at least 3.
    pub fn new(n: usize) -> Result<Self> {
        if n < 3 || n.is_multiple_of(2) {
            return Err(Error::InvalidParameter(format!(
                "number of thresholds must be odd and at least 3, got {n}"
            )));
        }
        Ok(Self {
            n,
            kappa_schedule: vec![KappaPair::default()],
            replacement: Replacement::WeightedMean,
        })
    }

    pub fn with_kappa(self, kappa: f64) -> Result<Self> {
        self.with_kappa_schedule(vec![KappaPair::symmetric(kappa)])
    }

    /// One pair per iteration; the last pair is reused once the schedule
    /// runs out.
    pub fn with_kappa_schedule(mut self, schedule: Vec<KappaPair>) -> Result<Self> {
        if schedule.is_empty() {
            return Err(Error::InvalidParameter("kappa schedule is empty".into()));
        }
        self.kappa_schedule = schedule
            .into_iter()
            .map(KappaPair::validate)
            .collect::<Result<_>>()?;
        Ok(self)
    }

    pub fn with_replacement(mut self, replacement: Replacement) -> Self {
        self.replacement = replacement;
        self
    }

    /// Same schedule and replacement, different threshold count.
    pub fn with_n(&self, n: usize) -> Result<Self> {
        Ok(Self {
            n: Self::new(n)?.n,
            ..self.clone()
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn iterations(&self) -> usize {
        (self.n - 1) / 2
    }

    pub fn kappa_schedule(&self) -> &[KappaPair] {
        &self.kappa_schedule
    }

    pub fn kappa_for(&self, iteration: usize) -> KappaPair {
        let last = self.kappa_schedule.len() - 1;
        self.kappa_schedule[iteration.min(last)]
    }

    pub fn replacement(&self) -> Replacement {
        self.replacement
    }
}

/// A class interval and the intensity its pixels are mapped to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Class {
    pub range: SubRange,
    pub replacement: u8,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SegmentationResult {
    thresholds: Vec<u8>,
    classes: Vec<Class>,
    lut: [u8; LEVELS],
    requested_n: usize,
}

impl SegmentationResult {
    /// Strictly increasing thresholds: lower cuts, middle split, upper cuts.
    pub fn thresholds(&self) -> &[u8] {
        &self.thresholds
    }

    /// Classes in intensity order; together they tile `[0, 255]`.
    pub fn classes(&self) -> &[Class] {
        &self.classes
    }

    pub fn lut(&self) -> &[u8; LEVELS] {
        &self.lut
    }

    /// Number of thresholds actually produced; below the requested count
    /// when the recursion ran out of spread.
    pub fn effective_n(&self) -> usize {
        self.thresholds.len()
    }

    pub fn requested_n(&self) -> usize {
        self.requested_n
    }

    pub fn terminated_early(&self) -> bool {
        self.effective_n() < self.requested_n
    }
}

/// Outcome of placing the two cuts of one iteration.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Step {
    Split {
        lower: u8,
        upper: u8,
    },
    /// The cuts collapsed: `lower >= upper`, or nothing would remain
    /// strictly between them.
    Degenerate,
}

pub(crate) fn round_half_up(x: f64) -> i64 {
    (x + 0.5).floor() as i64
}

/// Places `T1 = mu - k1*sigma` and `T2 = mu + k2*sigma`, rounded half-up and
/// clamped into `r`.
pub fn step_thresholds(stats: &RangeStats, r: SubRange, kappa: KappaPair) -> Step {
    let lower = r.clamp(round_half_up(stats.mean - kappa.lower * stats.std));
    let upper = r.clamp(round_half_up(stats.mean + kappa.upper * stats.std));
    if upper < lower || upper - lower < 2 {
        Step::Degenerate
    } else {
        Step::Split { lower, upper }
    }
}

/// Running tally of histogram bins read by [`segment_counted`].
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct WorkCounter {
    pub bin_reads: u64,
    pub iterations: u64,
}

impl WorkCounter {
    fn moments(&mut self, hist: &Histogram, r: SubRange) -> Moments {
        self.bin_reads += r.levels() as u64;
        Moments::of(hist, r)
    }
}

pub fn segment(hist: &Histogram, params: &SegmentationParams) -> Result<SegmentationResult> {
    segment_counted(hist, params, &mut WorkCounter::default())
}

/// [`segment`], recording how many histogram bins were read.
pub fn segment_counted(
    hist: &Histogram,
    params: &SegmentationParams,
    work: &mut WorkCounter,
) -> Result<SegmentationResult> {
    if hist.is_empty() {
        return Err(Error::EmptyImage);
    }
    let mut lower_cuts = Vec::with_capacity(params.iterations());
    let mut upper_cuts = Vec::with_capacity(params.iterations());
    let mut lower_classes = Vec::with_capacity(params.iterations() + 1);
    let mut upper_classes = Vec::with_capacity(params.iterations() + 1);
    let mut range = SubRange::FULL;

    for iteration in 0..params.iterations() {
        let moments = work.moments(hist, range);
        let Some(stats) = moments.stats() else {
            break;
        };
        let Step::Split { lower, upper } =
            step_thresholds(&stats, range, params.kappa_for(iteration))
        else {
            break;
        };
        work.iterations += 1;
        let parent = moments.rounded_mean();
        let low = SubRange::new(range.lo(), lower)?;
        let high = SubRange::new(upper, range.hi())?;
        lower_classes.push(make_class(hist, low, parent, params.replacement(), work));
        upper_classes.push(make_class(hist, high, parent, params.replacement(), work));
        lower_cuts.push(lower);
        upper_cuts.push(upper);
        range = SubRange::new(lower + 1, upper - 1)?;
    }

    // Final split of the residual range at its mean.
    let residual = work.moments(hist, range);
    let parent = residual.rounded_mean();
    let mut middle = Vec::with_capacity(1);
    if range.lo() == range.hi() {
        lower_classes.push(make_class(hist, range, parent, params.replacement(), work));
    } else {
        let split = match parent {
            Some(m) => m.clamp(range.lo(), range.hi() - 1),
            None => midpoint(range),
        };
        let low = SubRange::new(range.lo(), split)?;
        let high = SubRange::new(split + 1, range.hi())?;
        lower_classes.push(make_class(hist, low, parent, params.replacement(), work));
        upper_classes.push(make_class(hist, high, parent, params.replacement(), work));
        middle.push(split);
    }

    let thresholds: Vec<u8> = lower_cuts
        .into_iter()
        .chain(middle)
        .chain(upper_cuts.into_iter().rev())
        .collect();
    let classes: Vec<Class> = lower_classes
        .into_iter()
        .chain(upper_classes.into_iter().rev())
        .collect();

    let mut lut = [0u8; LEVELS];
    for class in &classes {
        for v in class.range.lo()..=class.range.hi() {
            lut[v as usize] = class.replacement;
        }
    }

    Ok(SegmentationResult {
        thresholds,
        classes,
        lut,
        requested_n: params.n(),
    })
}

// A class with no pixels takes the enclosing range's mean clamped into its
// interval; the value never reaches an output pixel but keeps the lut
// monotone and every replacement inside its class.
fn make_class(
    hist: &Histogram,
    range: SubRange,
    parent_mean: Option<u8>,
    replacement: Replacement,
    work: &mut WorkCounter,
) -> Class {
    let value = match replacement {
        Replacement::Midpoint => midpoint(range),
        Replacement::WeightedMean => match work.moments(hist, range).rounded_mean() {
            Some(m) => m,
            None => match parent_mean {
                Some(p) => range.clamp(p as i64),
                None => midpoint(range),
            },
        },
    };
    Class {
        range,
        replacement: value,
    }
}

/// Maps every pixel through the result's lookup table.
pub fn apply_mapping(image: &GrayImage, result: &SegmentationResult) -> GrayImage {
    apply_mapping_with(image, result, Exec::default())
}

pub fn apply_mapping_with(image: &GrayImage, result: &SegmentationResult, exec: Exec) -> GrayImage {
    image.map_lut(result.lut(), exec)
}

/// Histogram, segmentation and mapping in one call.
pub fn quantize(
    image: &GrayImage,
    params: &SegmentationParams,
) -> Result<(SegmentationResult, GrayImage)> {
    quantize_with(image, params, Exec::default())
}

pub fn quantize_with(
    image: &GrayImage,
    params: &SegmentationParams,
    exec: Exec,
) -> Result<(SegmentationResult, GrayImage)> {
    let hist = Histogram::from_image_with(image, exec);
    let result = segment(&hist, params)?;
    let out = apply_mapping_with(image, &result, exec);
    Ok((result, out))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub n: usize,
    pub effective_n: usize,
    pub psnr: Psnr,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Selection {
    pub chosen_n: usize,
    pub sweep: Vec<SweepPoint>,
}

/// Picks the threshold count at which PSNR saturates.
///
/// Evaluates `n = 3, 5, ..., n_max` and returns the smallest `n` whose step
/// to `n + 2` gains less than `epsilon` dB, or `n_max` if every step gains
/// more. An exact reconstruction (infinite PSNR) is saturated by definition
/// and ends the sweep.
pub fn auto_select_n(
    image: &GrayImage,
    base: &SegmentationParams,
    epsilon: f64,
    n_max: usize,
) -> Result<Selection> {
    auto_select_n_with(image, base, epsilon, n_max, Exec::default())
}

pub fn auto_select_n_with(
    image: &GrayImage,
    base: &SegmentationParams,
    epsilon: f64,
    n_max: usize,
    exec: Exec,
) -> Result<Selection> {
    if !(epsilon.is_finite() && epsilon > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "epsilon must be positive, got {epsilon}"
        )));
    }
    SegmentationParams::new(n_max)?;

    let hist = Histogram::from_image_with(image, exec);
    let evaluate = |n: usize| -> Result<SweepPoint> {
        let result = segment(&hist, &base.with_n(n)?)?;
        // Inner loops stay sequential; parallelism is across candidates.
        let out = apply_mapping_with(image, &result, Exec::Sequential);
        let mse = crate::metrics::mse_with(image, &out, Exec::Sequential)?;
        Ok(SweepPoint {
            n,
            effective_n: result.effective_n(),
            psnr: Psnr::from_mse(mse),
        })
    };
    let candidates: Vec<usize> = (3..=n_max).step_by(2).collect();
    let mut sweep: Vec<SweepPoint> = if exec.is_parallel() {
        #[cfg(feature = "parallel")]
        {
            candidates
                .par_iter()
                .map(|&n| evaluate(n))
                .collect::<Result<_>>()?
        }
        #[cfg(not(feature = "parallel"))]
        unreachable!()
    } else {
        candidates
            .iter()
            .map(|&n| evaluate(n))
            .collect::<Result<_>>()?
    };

    if let Some(exact) = sweep.iter().position(|p| p.psnr.is_infinite()) {
        sweep.truncate(exact + 1);
    }
    let chosen_n = sweep
        .windows(2)
        .find(|w| w[1].psnr.db() - w[0].psnr.db() < epsilon)
        .map(|w| w[0].n)
        .or_else(|| sweep.last().filter(|p| p.psnr.is_infinite()).map(|p| p.n))
        .unwrap_or(n_max);
    Ok(Selection { chosen_n, sweep })
}
