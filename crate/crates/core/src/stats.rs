//! Sub-range statistics computed from the histogram alone.
//!
//! Sums are accumulated in exact integer arithmetic and converted to floating
//! point with a single division, so results do not depend on summation order.

use serde::{Deserialize, Serialize};

use crate::{Error, Histogram, Result};

/// An inclusive intensity interval `[lo, hi]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "RawSubRange")]
pub struct SubRange {
    lo: u8,
    hi: u8,
}

#[derive(Deserialize)]
struct RawSubRange {
    lo: u8,
    hi: u8,
}

impl TryFrom<RawSubRange> for SubRange {
    type Error = Error;

    fn try_from(raw: RawSubRange) -> Result<Self> {
        SubRange::new(raw.lo, raw.hi)
    }
}

impl SubRange {
    pub const FULL: SubRange = SubRange { lo: 0, hi: 255 };

    pub fn new(lo: u8, hi: u8) -> Result<Self> {
        if lo > hi {
            return Err(Error::InvalidParameter(format!(
                "sub-range [{lo}, {hi}] has lo > hi"
            )));
        }
        Ok(Self { lo, hi })
    }

    pub fn lo(self) -> u8 {
        self.lo
    }

    pub fn hi(self) -> u8 {
        self.hi
    }

    /// Number of intensity levels covered (always at least 1).
    pub fn levels(self) -> usize {
        (self.hi - self.lo) as usize + 1
    }

    pub fn contains(self, v: u8) -> bool {
        self.lo <= v && v <= self.hi
    }

    /// Clamps `v` into the interval.
    pub fn clamp(self, v: i64) -> u8 {
        v.clamp(self.lo as i64, self.hi as i64) as u8
    }

    pub(crate) fn bins(self, hist: &Histogram) -> impl Iterator<Item = (u64, u64)> + '_ {
        (self.lo..=self.hi).map(|v| (v as u64, hist.count(v)))
    }
}

impl std::fmt::Display for SubRange {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

/// Exact zeroth, first and second moments of a sub-range.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub(crate) struct Moments {
    pub count: u64,
    pub sum: u64,
    pub sum_sq: u128,
}

impl Moments {
    pub fn of(hist: &Histogram, r: SubRange) -> Self {
        r.bins(hist).fold(Moments::default(), |m, (v, c)| Moments {
            count: m.count + c,
            sum: m.sum + v * c,
            sum_sq: m.sum_sq + (v * v) as u128 * c as u128,
        })
    }

    pub fn stats(&self) -> Option<RangeStats> {
        if self.count == 0 {
            return None;
        }
        let n = self.count as u128;
        let s = self.sum as u128;
        // n * sum_sq - sum^2 = n^2 * variance, exact and non-negative.
        let scaled_var = n * self.sum_sq - s * s;
        Some(RangeStats {
            count: self.count,
            mean: self.sum as f64 / self.count as f64,
            std: (scaled_var as f64).sqrt() / self.count as f64,
        })
    }

    /// `round-half-up(sum / count)` in integer arithmetic.
    pub fn rounded_mean(&self) -> Option<u8> {
        (self.count > 0)
            .then(|| ((2 * self.sum as u128 + self.count as u128) / (2 * self.count as u128)) as u8)
    }
}

/// Population statistics of the pixels whose intensity lies in a sub-range.
///
/// Only constructed for non-empty ranges; an empty range is `None` at the
/// call site, never a zero mean.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RangeStats {
    pub count: u64,
    pub mean: f64,
    pub std: f64,
}

/// Count, mean and population standard deviation over `r`, or `None` when
/// no pixel falls inside it.
pub fn range_stats(hist: &Histogram, r: SubRange) -> Option<RangeStats> {
    Moments::of(hist, r).stats()
}

/// Histogram-weighted mean intensity of `r`, rounded half-up.
pub fn weighted_mean(hist: &Histogram, r: SubRange) -> Option<u8> {
    Moments::of(hist, r).rounded_mean()
}

/// Middle level of `r`, rounded down.
pub fn midpoint(r: SubRange) -> u8 {
    ((r.lo as u16 + r.hi as u16) / 2) as u8
}
