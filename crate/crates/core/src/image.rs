//! Grayscale raster and intensity histogram.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

use crate::exec::{Exec, PIXEL_CHUNK};
use crate::{Error, Result};

/// Number of representable intensity levels.
pub const LEVELS: usize = 256;

/// An 8-bit single-channel image stored row-major, top-left origin.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GrayImage {
    width: usize,
    height: usize,
    pixels: Vec<u8>,
}

impl GrayImage {
    /// Wraps `pixels` as a `width` x `height` image.
    ///
    /// Both dimensions must be positive and `pixels.len()` must equal their
    /// product.
    pub fn new(width: usize, height: usize, pixels: Vec<u8>) -> Result<Self> {
        let expected = width.checked_mul(height);
        if width == 0 || height == 0 || expected != Some(pixels.len()) {
            return Err(Error::InvalidDimensions {
                width,
                height,
                len: pixels.len(),
            });
        }
        Ok(Self {
            width,
            height,
            pixels,
        })
    }

    pub fn filled(width: usize, height: usize, value: u8) -> Result<Self> {
        Self::new(width, height, vec![value; width.saturating_mul(height)])
    }

    /// Builds an image by evaluating `f(x, y)` for every pixel.
    pub fn from_fn(
        width: usize,
        height: usize,
        mut f: impl FnMut(usize, usize) -> u8,
    ) -> Result<Self> {
        let mut pixels = Vec::with_capacity(width.saturating_mul(height));
        for y in 0..height {
            for x in 0..width {
                pixels.push(f(x, y));
            }
        }
        Self::new(width, height, pixels)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn pixels(&self) -> &[u8] {
        &self.pixels
    }

    pub fn into_pixels(self) -> Vec<u8> {
        self.pixels
    }

    /// Total pixel count.
    pub fn len(&self) -> usize {
        self.pixels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pixels.is_empty()
    }

    pub fn get(&self, x: usize, y: usize) -> Option<u8> {
        if x < self.width && y < self.height {
            Some(self.pixels[y * self.width + x])
        } else {
            None
        }
    }

    pub(crate) fn same_dimensions(&self, other: &GrayImage) -> Result<()> {
        if self.width != other.width || self.height != other.height {
            return Err(Error::DimensionMismatch(
                self.width,
                self.height,
                other.width,
                other.height,
            ));
        }
        Ok(())
    }

    /// Returns a new image with every pixel passed through `lut`.
    pub(crate) fn map_lut(&self, lut: &[u8; LEVELS], exec: Exec) -> GrayImage {
        let mut out = vec![0u8; self.pixels.len()];
        let apply = |(dst, src): (&mut [u8], &[u8])| {
            for (d, &s) in dst.iter_mut().zip(src) {
                *d = lut[s as usize];
            }
        };
        if exec.is_parallel() {
            #[cfg(feature = "parallel")]
            out.par_chunks_mut(PIXEL_CHUNK)
                .zip(self.pixels.par_chunks(PIXEL_CHUNK))
                .for_each(apply);
        } else {
            out.chunks_mut(PIXEL_CHUNK)
                .zip(self.pixels.chunks(PIXEL_CHUNK))
                .for_each(apply);
        }
        GrayImage {
            width: self.width,
            height: self.height,
            pixels: out,
        }
    }
}

/// Per-intensity pixel counts of an image.
///
/// All segmentation statistics are derived from this table; pixels are
/// scanned exactly once to build it.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Histogram {
    bins: [u64; LEVELS],
    total: u64,
}

impl Histogram {
    pub fn from_bins(bins: [u64; LEVELS]) -> Self {
        let total = bins.iter().sum();
        Self { bins, total }
    }

    /// Builds a histogram from a sparse `(intensity, count)` list. Repeated
    /// intensities accumulate.
    pub fn from_counts<I: IntoIterator<Item = (u8, u64)>>(counts: I) -> Self {
        let mut bins = [0u64; LEVELS];
        for (v, c) in counts {
            bins[v as usize] += c;
        }
        Self::from_bins(bins)
    }

    pub fn from_image(image: &GrayImage) -> Self {
        Self::from_image_with(image, Exec::default())
    }

    pub fn from_image_with(image: &GrayImage, exec: Exec) -> Self {
        let pixels = image.pixels();
        let bins = if exec.is_parallel() {
            #[cfg(feature = "parallel")]
            {
                pixels
                    .par_chunks(PIXEL_CHUNK)
                    .map(tally)
                    .reduce(|| [0u64; LEVELS], merge)
            }
            #[cfg(not(feature = "parallel"))]
            unreachable!()
        } else {
            tally(pixels)
        };
        Self {
            bins,
            total: pixels.len() as u64,
        }
    }

    pub fn bins(&self) -> &[u64; LEVELS] {
        &self.bins
    }

    pub fn count(&self, level: u8) -> u64 {
        self.bins[level as usize]
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn is_empty(&self) -> bool {
        self.total == 0
    }
}

impl std::fmt::Debug for Histogram {
    // Only the occupied bins; 256 zeros are noise in assertion output.
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_map()
            .entries(self.bins.iter().enumerate().filter(|(_, &c)| c > 0))
            .finish()
    }
}

pub fn compute_histogram(image: &GrayImage) -> Histogram {
    Histogram::from_image(image)
}

fn tally(pixels: &[u8]) -> [u64; LEVELS] {
    // Four interleaved tables break the store-to-load dependency on runs of
    // equal pixels.
    let mut parts = [[0u32; LEVELS]; 4];
    let mut quads = pixels.chunks_exact(4);
    for q in &mut quads {
        parts[0][q[0] as usize] += 1;
        parts[1][q[1] as usize] += 1;
        parts[2][q[2] as usize] += 1;
        parts[3][q[3] as usize] += 1;
    }
    for &p in quads.remainder() {
        parts[0][p as usize] += 1;
    }
    let mut bins = [0u64; LEVELS];
    for part in &parts {
        for (b, &c) in bins.iter_mut().zip(part) {
            *b += c as u64;
        }
    }
    bins
}

#[cfg(feature = "parallel")]
fn merge(mut a: [u64; LEVELS], b: [u64; LEVELS]) -> [u64; LEVELS] {
    for (x, y) in a.iter_mut().zip(b) {
        *x += y;
    }
    a
}
