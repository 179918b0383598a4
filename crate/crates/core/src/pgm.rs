//! PGM reader and writer.
//!
//! Reads binary (`P5`) and ASCII (`P2`) graymaps with maxval 255. Header
//! tokens may be separated by any run of whitespace, and `#` starts a comment
//! that runs to the end of the line. The writer always emits `P5`.

use std::path::Path;

use crate::{Error, GrayImage, Result};

#[derive(Clone, Copy, PartialEq, Eq)]
enum Encoding {
    Ascii,
    Binary,
}

struct Cursor<'a> {
    data: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn skip_whitespace_and_comments(&mut self) {
        while let Some(&b) = self.data.get(self.pos) {
            if b == b'#' {
                while let Some(&c) = self.data.get(self.pos) {
                    self.pos += 1;
                    if c == b'\n' || c == b'\r' {
                        break;
                    }
                }
            } else if b.is_ascii_whitespace() {
                self.pos += 1;
            } else {
                break;
            }
        }
    }

    /// Next decimal token, or `None` at end of input.
    fn number(&mut self, what: &str) -> Result<Option<u64>> {
        self.skip_whitespace_and_comments();
        let start = self.pos;
        while self.data.get(self.pos).is_some_and(u8::is_ascii_digit) {
            self.pos += 1;
        }
        if start == self.pos {
            return match self.data.get(self.pos) {
                None => Ok(None),
                Some(&b) => Err(Error::Format(format!(
                    "expected {what}, found byte 0x{b:02x}"
                ))),
            };
        }
        // A number must be followed by whitespace, a comment or end of data.
        if let Some(&b) = self.data.get(self.pos) {
            if !b.is_ascii_whitespace() && b != b'#' {
                return Err(Error::Format(format!(
                    "unexpected byte 0x{b:02x} after {what}"
                )));
            }
        }
        let text = std::str::from_utf8(&self.data[start..self.pos]).expect("ascii digits");
        text.parse()
            .map(Some)
            .map_err(|_| Error::Format(format!("{what} out of range")))
    }

    fn header_field(&mut self, what: &str) -> Result<u64> {
        self.number(what)?
            .ok_or_else(|| Error::Format(format!("missing {what}")))
    }
}

/// Parses a PGM image from memory.
pub fn read_pgm(bytes: &[u8]) -> Result<GrayImage> {
    let encoding = match bytes.get(..2) {
        Some(b"P5") => Encoding::Binary,
        Some(b"P2") => Encoding::Ascii,
        Some(m) if m[0] == b'P' => {
            return Err(Error::Format(format!(
                "unsupported magic {:?}: only grayscale P2/P5 is accepted",
                String::from_utf8_lossy(m)
            )))
        }
        _ => return Err(Error::Format("missing P2/P5 magic".into())),
    };
    let mut cur = Cursor {
        data: bytes,
        pos: 2,
    };
    if !cur
        .data
        .get(2)
        .is_some_and(|b| b.is_ascii_whitespace() || *b == b'#')
    {
        return Err(Error::Format("magic must be followed by whitespace".into()));
    }

    let width = cur.header_field("width")?;
    let height = cur.header_field("height")?;
    let maxval = cur.header_field("maxval")?;
    if width == 0 || height == 0 {
        return Err(Error::Format(format!("zero dimension {width}x{height}")));
    }
    if maxval != 255 {
        return Err(Error::UnsupportedDepth(maxval));
    }
    let expected = usize::try_from(width)
        .ok()
        .zip(usize::try_from(height).ok())
        .and_then(|(w, h)| w.checked_mul(h))
        .ok_or_else(|| Error::Format("image dimensions overflow".into()))?;

    let pixels = match encoding {
        Encoding::Binary => {
            // Exactly one whitespace byte separates maxval from the raster.
            let start = cur.pos + 1;
            let available = bytes.len().saturating_sub(start);
            if available < expected {
                return Err(Error::Truncated {
                    expected,
                    found: available,
                });
            }
            bytes[start..start + expected].to_vec()
        }
        Encoding::Ascii => {
            let mut pixels = Vec::with_capacity(expected);
            while pixels.len() < expected {
                match cur.number("pixel value")? {
                    Some(v) if v <= 255 => pixels.push(v as u8),
                    Some(v) => {
                        return Err(Error::Format(format!("pixel value {v} exceeds maxval 255")))
                    }
                    None => {
                        return Err(Error::Truncated {
                            expected,
                            found: pixels.len(),
                        })
                    }
                }
            }
            pixels
        }
    };
    GrayImage::new(width as usize, height as usize, pixels)
}

/// Serializes `image` as binary PGM: `P5\n<w> <h>\n255\n` followed by the
/// raw pixel bytes.
pub fn write_pgm(image: &GrayImage) -> Vec<u8> {
    let header = format!("P5\n{} {}\n255\n", image.width(), image.height());
    let mut out = Vec::with_capacity(header.len() + image.len());
    out.extend_from_slice(header.as_bytes());
    out.extend_from_slice(image.pixels());
    out
}

pub fn read_pgm_file(path: impl AsRef<Path>) -> Result<GrayImage> {
    read_pgm(&std::fs::read(path)?)
}

pub fn write_pgm_file(path: impl AsRef<Path>, image: &GrayImage) -> Result<()> {
    std::fs::write(path, write_pgm(image))?;
    Ok(())
}
