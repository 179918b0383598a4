//! Test-only reference implementations. Nothing here calls into the
//! segmenter or the Otsu search; they are written from the definitions with
//! plain floating-point loops so they can check the library independently.

#![allow(dead_code, clippy::needless_range_loop)]

use rand::Rng;
use recthresh::{GrayImage, Histogram};

pub type Bins = [u64; 256];

/// `(lo, hi, replacement)`
pub type OracleClass = (u8, u8, u8);

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum OracleReplacement {
    WeightedMean,
    Midpoint,
}

fn round_half_up(x: f64) -> i64 {
    (x + 0.5).floor() as i64
}

/// Two-pass mean and population standard deviation over `[lo, hi]`.
pub fn mean_std(bins: &Bins, lo: usize, hi: usize) -> Option<(f64, f64)> {
    let count: u64 = bins[lo..=hi].iter().sum();
    if count == 0 {
        return None;
    }
    let mut weighted = 0.0f64;
    for v in lo..=hi {
        weighted += v as f64 * bins[v] as f64;
    }
    let mean = weighted / count as f64;
    let mut sq = 0.0f64;
    for v in lo..=hi {
        sq += bins[v] as f64 * (v as f64 - mean) * (v as f64 - mean);
    }
    Some((mean, (sq / count as f64).sqrt()))
}

fn rounded_mean(bins: &Bins, lo: usize, hi: usize) -> Option<i64> {
    mean_std(bins, lo, hi).map(|(m, _)| round_half_up(m))
}

fn replacement(
    bins: &Bins,
    lo: usize,
    hi: usize,
    parent: Option<i64>,
    how: OracleReplacement,
) -> u8 {
    let mid = ((lo + hi) / 2) as i64;
    let v = match how {
        OracleReplacement::Midpoint => mid,
        OracleReplacement::WeightedMean => rounded_mean(bins, lo, hi)
            .or(parent.map(|p| p.clamp(lo as i64, hi as i64)))
            .unwrap_or(mid),
    };
    v as u8
}

/// Step-by-step recursion: stats, cuts at mean -/+ kappa*std (rounded half
/// up, clamped), recurse on the inside, final split at the rounded mean.
pub fn oracle_segment(
    bins: &Bins,
    n: usize,
    kappas: &[(f64, f64)],
    how: OracleReplacement,
) -> (Vec<u8>, Vec<OracleClass>) {
    let (mut lo, mut hi) = (0usize, 255usize);
    let mut lows = vec![];
    let mut highs = vec![];
    let mut left = vec![];
    let mut right = vec![];
    for step in 0..(n - 1) / 2 {
        let Some((mean, std)) = mean_std(bins, lo, hi) else {
            break;
        };
        let (k1, k2) = kappas[step.min(kappas.len() - 1)];
        let t1 = round_half_up(mean - k1 * std).clamp(lo as i64, hi as i64) as usize;
        let t2 = round_half_up(mean + k2 * std).clamp(lo as i64, hi as i64) as usize;
        if t2 < t1 + 2 {
            break;
        }
        let parent = Some(round_half_up(mean));
        left.push((lo as u8, t1 as u8, replacement(bins, lo, t1, parent, how)));
        right.push((t2 as u8, hi as u8, replacement(bins, t2, hi, parent, how)));
        lows.push(t1 as u8);
        highs.push(t2 as u8);
        lo = t1 + 1;
        hi = t2 - 1;
    }
    let parent = rounded_mean(bins, lo, hi);
    let mut middle = vec![];
    if lo == hi {
        left.push((lo as u8, hi as u8, replacement(bins, lo, hi, parent, how)));
    } else {
        let split = match parent {
            Some(m) => m.clamp(lo as i64, hi as i64 - 1) as usize,
            None => (lo + hi) / 2,
        };
        left.push((
            lo as u8,
            split as u8,
            replacement(bins, lo, split, parent, how),
        ));
        right.push((
            (split + 1) as u8,
            hi as u8,
            replacement(bins, split + 1, hi, parent, how),
        ));
        middle.push(split as u8);
    }
    highs.reverse();
    right.reverse();
    let thresholds = lows.into_iter().chain(middle).chain(highs).collect();
    let classes = left.into_iter().chain(right).collect();
    (thresholds, classes)
}

/// Between-class variance by scanning each class's bins directly.
pub fn oracle_between_class(bins: &Bins, thresholds: &[usize]) -> f64 {
    let total: u64 = bins.iter().sum();
    if total == 0 {
        return 0.0;
    }
    let total_mean = (0..256).map(|v| v as f64 * bins[v] as f64).sum::<f64>() / total as f64;
    let mut bounds = vec![];
    let mut start = 0;
    for &t in thresholds {
        bounds.push((start, t));
        start = t + 1;
    }
    bounds.push((start, 255));
    let mut acc = 0.0;
    for (lo, hi) in bounds {
        let mut n = 0u64;
        let mut s = 0u64;
        for v in lo..=hi {
            n += bins[v];
            s += v as u64 * bins[v];
        }
        if n > 0 {
            let d = s as f64 / n as f64 - total_mean;
            acc += n as f64 / total as f64 * d * d;
        }
    }
    acc
}

/// Brute-force Otsu: every ascending `k`-tuple in `[0, 254]`, first
/// maximum in lexicographic order wins.
pub fn oracle_otsu(bins: &Bins, k: usize) -> (Vec<usize>, f64) {
    let mut best = (vec![], f64::NEG_INFINITY);
    let mut tuple = vec![0usize; k];
    fn rec(
        bins: &Bins,
        depth: usize,
        start: usize,
        tuple: &mut Vec<usize>,
        best: &mut (Vec<usize>, f64),
    ) {
        if depth == tuple.len() {
            let c = oracle_between_class(bins, tuple);
            if c > best.1 {
                *best = (tuple.clone(), c);
            }
            return;
        }
        let remaining = tuple.len() - depth - 1;
        for t in start..=(254 - remaining) {
            tuple[depth] = t;
            rec(bins, depth + 1, t + 1, tuple, best);
        }
    }
    rec(bins, 0, 0, &mut tuple, &mut best);
    best
}

pub fn pixel_tally(pixels: &[u8]) -> Bins {
    let mut bins = [0u64; 256];
    for &p in pixels {
        bins[p as usize] += 1;
    }
    bins
}

/// Histogram with `support` random occupied levels and random masses.
pub fn random_bins<R: Rng>(rng: &mut R, max_support: usize, max_mass: u64) -> Bins {
    let mut bins = [0u64; 256];
    let support = rng.random_range(1..=max_support);
    for _ in 0..support {
        bins[rng.random_range(0..256)] += rng.random_range(1..=max_mass);
    }
    bins
}

pub fn random_image<R: Rng>(rng: &mut R, max_side: usize) -> GrayImage {
    let w = rng.random_range(1..=max_side);
    let h = rng.random_range(1..=max_side);
    // Pixels drawn from a random sub-range so histograms vary in width.
    let a: u8 = rng.random();
    let b: u8 = rng.random();
    let (lo, hi) = (a.min(b), a.max(b));
    let pixels = (0..w * h).map(|_| rng.random_range(lo..=hi)).collect();
    GrayImage::new(w, h, pixels).unwrap()
}

pub fn fixture_dir() -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures")
}

/// Natural-image fixtures shipped with the crate, sorted by name.
pub fn natural_fixtures() -> Vec<(String, GrayImage)> {
    let mut files: Vec<_> = std::fs::read_dir(fixture_dir())
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "pgm"))
        .collect();
    files.sort();
    files
        .into_iter()
        .map(|p| {
            let name = p.file_stem().unwrap().to_string_lossy().into_owned();
            (name, recthresh::pgm::read_pgm_file(&p).unwrap())
        })
        .collect()
}

pub fn hist(bins: &Bins) -> Histogram {
    Histogram::from_bins(*bins)
}
