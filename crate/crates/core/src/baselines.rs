//! Otsu thresholding baselines.
//!
//! `otsu_bilevel` is the classic single-threshold maximizer. The multilevel
//! variant searches every ascending tuple of up to three thresholds, which is
//! the cost the recursive segmenter is measured against.
//!
//! Thresholds partition the intensity axis as `[0, t1], [t1+1, t2], ...,
//! [tk+1, 255]` and always lie in `[0, 254]`, so no class is empty by
//! construction of the interval. Ties resolve to the lexicographically
//! smallest tuple.

#[cfg(feature = "parallel")]
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::{Error, Exec, Histogram, Result, LEVELS};

/// Largest admissible threshold; 255 would leave the top class empty.
pub const MAX_THRESHOLD: u8 = 254;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OtsuResult {
    pub thresholds: Vec<u8>,
    /// Between-class variance achieved by `thresholds`.
    pub criterion: f64,
}

/// Prefix sums of counts and intensity-weighted counts.
struct Cumulative {
    count: [u64; LEVELS + 1],
    sum: [u64; LEVELS + 1],
    total_mean: f64,
    total: f64,
}

impl Cumulative {
    fn new(hist: &Histogram) -> Self {
        let mut count = [0u64; LEVELS + 1];
        let mut sum = [0u64; LEVELS + 1];
        for (v, &c) in hist.bins().iter().enumerate() {
            count[v + 1] = count[v] + c;
            sum[v + 1] = sum[v] + v as u64 * c;
        }
        let total = count[LEVELS] as f64;
        Self {
            count,
            sum,
            total_mean: sum[LEVELS] as f64 / total,
            total,
        }
    }

    /// Contribution `w * (mu_c - mu)^2` of the class `[lo, hi]`.
    fn term(&self, lo: usize, hi: usize) -> f64 {
        let n = self.count[hi + 1] - self.count[lo];
        if n == 0 {
            return 0.0;
        }
        let s = self.sum[hi + 1] - self.sum[lo];
        class_term(n, s, self.total, self.total_mean)
    }
}

#[inline]
fn class_term(count: u64, sum: u64, total: f64, total_mean: f64) -> f64 {
    let d = sum as f64 / count as f64 - total_mean;
    count as f64 / total * d * d
}

/// Between-class variance of the partition induced by ascending
/// `thresholds`. An empty histogram or an empty class contributes 0.
pub fn between_class_variance(hist: &Histogram, thresholds: &[u8]) -> f64 {
    if hist.is_empty() {
        return 0.0;
    }
    let cum = Cumulative::new(hist);
    let mut start = 0usize;
    let mut criterion = 0.0;
    for hi in thresholds.iter().map(|&t| t as usize).chain([LEVELS - 1]) {
        if hi >= start {
            criterion += cum.term(start, hi);
        }
        start = start.max(hi + 1);
    }
    criterion
}

/// Single threshold maximizing the between-class variance.
pub fn otsu_bilevel(hist: &Histogram) -> Result<OtsuResult> {
    if hist.is_empty() {
        return Err(Error::EmptyImage);
    }
    let cum = Cumulative::new(hist);
    let mut best = (f64::NEG_INFINITY, 0u8);
    for t in 0..=MAX_THRESHOLD as usize {
        let c = cum.term(0, t) + cum.term(t + 1, LEVELS - 1);
        if c > best.0 {
            best = (c, t as u8);
        }
    }
    Ok(OtsuResult {
        thresholds: vec![best.1],
        criterion: best.0,
    })
}

pub fn otsu_multilevel_exhaustive(hist: &Histogram, k: usize) -> Result<OtsuResult> {
    otsu_multilevel_exhaustive_with(hist, k, Exec::default())
}

/// Exhaustive search over all ascending `k`-tuples, `1 <= k <= 3`.
pub fn otsu_multilevel_exhaustive_with(
    hist: &Histogram,
    k: usize,
    exec: Exec,
) -> Result<OtsuResult> {
    if !(1..=3).contains(&k) {
        return Err(Error::InvalidParameter(format!(
            "exhaustive Otsu supports 1 to 3 thresholds, got {k}"
        )));
    }
    if hist.is_empty() {
        return Err(Error::EmptyImage);
    }
    let table = TermTable::new(hist);
    let last_first = MAX_THRESHOLD as usize + 1 - k;
    let best = if exec.is_parallel() {
        #[cfg(feature = "parallel")]
        {
            (0..=last_first)
                .into_par_iter()
                .map(|t1| table.best_with_first(t1, k))
                .reduce(Candidate::none, Candidate::better)
        }
        #[cfg(not(feature = "parallel"))]
        unreachable!()
    } else {
        (0..=last_first)
            .map(|t1| table.best_with_first(t1, k))
            .fold(Candidate::none(), Candidate::better)
    };
    Ok(OtsuResult {
        thresholds: best.tuple[..k].iter().map(|&t| t as u8).collect(),
        criterion: best.criterion,
    })
}

/// Class contributions for every interval `[lo, hi]`, row-major by `lo`.
struct TermTable {
    terms: Vec<f64>,
}

impl TermTable {
    fn new(hist: &Histogram) -> Self {
        let cum = Cumulative::new(hist);
        let mut terms = vec![0.0; LEVELS * LEVELS];
        for lo in 0..LEVELS {
            for hi in lo..LEVELS {
                terms[lo * LEVELS + hi] = cum.term(lo, hi);
            }
        }
        Self { terms }
    }

    #[inline]
    fn term(&self, lo: usize, hi: usize) -> f64 {
        self.terms[lo * LEVELS + hi]
    }

    /// Best tuple whose first threshold is `t1`, scanning the remaining
    /// thresholds in lexicographic order.
    fn best_with_first(&self, t1: usize, k: usize) -> Candidate {
        let top = LEVELS - 1;
        let max = MAX_THRESHOLD as usize;
        let head = self.term(0, t1);
        let mut best = Candidate::none();
        match k {
            1 => best.offer(head + self.term(t1 + 1, top), [t1, 0, 0]),
            2 => {
                for t2 in t1 + 1..=max {
                    best.offer(
                        head + self.term(t1 + 1, t2) + self.term(t2 + 1, top),
                        [t1, t2, 0],
                    );
                }
            }
            _ => {
                for t2 in t1 + 1..max {
                    let mid = head + self.term(t1 + 1, t2);
                    for t3 in t2 + 1..=max {
                        best.offer(
                            mid + self.term(t2 + 1, t3) + self.term(t3 + 1, top),
                            [t1, t2, t3],
                        );
                    }
                }
            }
        }
        best
    }
}

#[derive(Clone, Copy, Debug)]
struct Candidate {
    criterion: f64,
    tuple: [usize; 3],
}

impl Candidate {
    fn none() -> Self {
        Self {
            criterion: f64::NEG_INFINITY,
            tuple: [usize::MAX; 3],
        }
    }

    // Candidates arrive in lexicographic order, so only a strict improvement
    // replaces the incumbent.
    fn offer(&mut self, criterion: f64, tuple: [usize; 3]) {
        if criterion > self.criterion {
            *self = Self { criterion, tuple };
        }
    }

    fn better(a: Self, b: Self) -> Self {
        if b.criterion > a.criterion || (b.criterion == a.criterion && b.tuple < a.tuple) {
            b
        } else {
            a
        }
    }
}
