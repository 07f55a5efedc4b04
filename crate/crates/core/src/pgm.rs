//! PGM (portable graymap) reading and writing.
//!
//! Reads binary `P5` and ASCII `P2` files with `maxval <= 255`; always writes `P5`
//! with `maxval = 255`. Samples are stored row-major in the file and converted to
//! the column-major [`Image`] layout on load.

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::image::Image;

pub fn load_pgm(path: impl AsRef<Path>) -> Result<Image> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    decode_pgm(&bytes)
}

/// Writes `img` as `P5`. Values are clamped to `[0, 255]` and rounded half away from zero.
pub fn save_pgm(img: &Image, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, encode_pgm(img)).map_err(|e| Error::io(path, e))
}

/// The byte a sample quantizes to on write.
pub fn quantize(v: f64) -> u8 {
    v.clamp(0.0, 255.0).round() as u8
}

pub fn encode_pgm(img: &Image) -> Vec<u8> {
    let n = img.n();
    let mut out = format!("P5\n{n} {n}\n255\n").into_bytes();
    out.extend(img.to_row_major().into_iter().map(quantize));
    out
}

pub fn decode_pgm(bytes: &[u8]) -> Result<Image> {
    let mut cur = Cursor { bytes, pos: 0 };
    let magic = cur.token()?;
    let binary = match magic.as_slice() {
        b"P5" => true,
        b"P2" => false,
        other => {
            return Err(Error::PgmHeader(format!(
                "unsupported magic {:?}",
                String::from_utf8_lossy(other)
            )))
        }
    };
    let width = cur.number("width")?;
    let height = cur.number("height")?;
    let maxval = cur.number("maxval")?;
    if width == 0 || height == 0 {
        return Err(Error::PgmHeader("zero dimension".into()));
    }
    if maxval == 0 {
        return Err(Error::PgmHeader("maxval must be positive".into()));
    }
    if maxval > 255 {
        return Err(Error::MaxvalTooLarge(maxval));
    }
    if width != height {
        return Err(Error::NonSquare { width: width as usize, height: height as usize });
    }
    let n = width as usize;
    let expected = n * n;

    let samples: Vec<f64> = if binary {
        // exactly one whitespace byte separates maxval from the raster
        match cur.bytes.get(cur.pos) {
            Some(b) if b.is_ascii_whitespace() => cur.pos += 1,
            _ => return Err(Error::PgmHeader("missing whitespace after maxval".into())),
        }
        let raster = &cur.bytes[cur.pos..];
        if raster.len() < expected {
            return Err(Error::PgmTruncated { expected, found: raster.len() });
        }
        raster[..expected].iter().map(|&b| f64::from(b)).collect()
    } else {
        let mut samples = Vec::with_capacity(expected);
        for found in 0..expected {
            if cur.at_end() {
                return Err(Error::PgmTruncated { expected, found });
            }
            samples.push(f64::from(cur.number("sample")?));
        }
        samples
    };
    if let Some(v) = samples.iter().find(|&&v| v > f64::from(maxval)) {
        return Err(Error::PgmHeader(format!("sample {v} exceeds maxval {maxval}")));
    }
    Image::from_row_major(n, &samples)
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl Cursor<'_> {
    fn skip_blank(&mut self) {
        while let Some(&b) = self.bytes.get(self.pos) {
            if b == b'#' {
                while let Some(&c) = self.bytes.get(self.pos) {
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

    fn at_end(&mut self) -> bool {
        self.skip_blank();
        self.pos >= self.bytes.len()
    }

    fn token(&mut self) -> Result<Vec<u8>> {
        self.skip_blank();
        let start = self.pos;
        while let Some(&b) = self.bytes.get(self.pos) {
            if b.is_ascii_whitespace() || b == b'#' {
                break;
            }
            self.pos += 1;
        }
        if start == self.pos {
            return Err(Error::PgmHeader("unexpected end of file".into()));
        }
        Ok(self.bytes[start..self.pos].to_vec())
    }

    fn number(&mut self, what: &str) -> Result<u32> {
        let tok = self.token()?;
        std::str::from_utf8(&tok)
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| {
                Error::PgmHeader(format!("bad {what} {:?}", String::from_utf8_lossy(&tok)))
            })
    }
}
