//! 8-bit binary PGM (P5) I/O and the built-in test phantom.

use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrayImage {
    pub width: usize,
    pub height: usize,
    /// Row-major, one byte per pixel.
    pub pixels: Vec<u8>,
}

impl GrayImage {
    /// Intensities scaled to `[0, 1]`.
    pub fn to_unit(&self) -> Vec<f64> {
        self.pixels.iter().map(|&p| p as f64 / 255.0).collect()
    }

    pub fn from_unit(width: usize, height: usize, values: &[f64]) -> Result<Self> {
        if values.len() != width * height {
            return Err(Error::DimensionMismatch {
                what: "image pixels",
                expected: width * height,
                got: values.len(),
            });
        }
        Ok(Self {
            width,
            height,
            pixels: to_gray_bytes(values),
        })
    }
}

/// Clamps to `[0, 1]` and quantizes to 8 bits.
pub fn to_gray_bytes(values: &[f64]) -> Vec<u8> {
    values
        .iter()
        .map(|&v| (v.clamp(0.0, 1.0) * 255.0).round() as u8)
        .collect()
}

fn bad(msg: &str) -> Error {
    Error::BadShape(format!("PGM: {msg}"))
}

/// Parses a binary P5 image with `maxval ≤ 255`; `#` comments are allowed in
/// the header.
pub fn parse_pgm(bytes: &[u8]) -> Result<GrayImage> {
    let mut pos = 0;
    let mut tokens = Vec::with_capacity(4);
    while tokens.len() < 4 {
        while pos < bytes.len() && (bytes[pos].is_ascii_whitespace() || bytes[pos] == b'#') {
            if bytes[pos] == b'#' {
                while pos < bytes.len() && bytes[pos] != b'\n' {
                    pos += 1;
                }
            } else {
                pos += 1;
            }
        }
        let start = pos;
        while pos < bytes.len() && !bytes[pos].is_ascii_whitespace() && bytes[pos] != b'#' {
            pos += 1;
        }
        if start == pos {
            return Err(bad("truncated header"));
        }
        tokens.push(std::str::from_utf8(&bytes[start..pos]).map_err(|_| bad("non-ascii header"))?);
    }
    if tokens[0] != "P5" {
        return Err(bad("only binary P5 images are supported"));
    }
    let num = |s: &str| s.parse::<usize>().map_err(|_| bad("invalid header number"));
    let (width, height, maxval) = (num(tokens[1])?, num(tokens[2])?, num(tokens[3])?);
    if maxval == 0 || maxval > 255 {
        return Err(bad("maxval must lie in 1..=255"));
    }
    // exactly one whitespace byte separates the header from the raster
    pos += 1;
    let len = width * height;
    if bytes.len() < pos + len {
        return Err(bad("raster shorter than width*height"));
    }
    let pixels = bytes[pos..pos + len]
        .iter()
        .map(|&p| ((p as usize * 255 + maxval / 2) / maxval).min(255) as u8)
        .collect();
    Ok(GrayImage { width, height, pixels })
}

pub fn read_pgm(path: &Path) -> Result<GrayImage> {
    parse_pgm(&std::fs::read(path)?)
}

/// Writes through a temporary file in the target directory and renames it.
pub fn write_pgm(path: &Path, image: &GrayImage) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    write!(tmp, "P5\n{} {}\n255\n", image.width, image.height)?;
    tmp.write_all(&image.pixels)?;
    tmp.persist(path).map_err(|e| Error::Io(e.to_string()))?;
    Ok(())
}

/// Piecewise-constant test image with intensities in `[0, 1]`. Edges sit on
/// a 16×16 grid, so the image is sparse under the Haar transform.
pub fn phantom(side: usize) -> Vec<f64> {
    // (row0, col0, row1, col1, value) in sixteenths of the side
    const RECTS: [(usize, usize, usize, usize, f64); 6] = [
        (0, 0, 16, 16, 0.1),
        (2, 2, 14, 14, 0.5),
        (4, 5, 7, 11, 0.9),
        (9, 3, 13, 6, 0.25),
        (9, 9, 12, 13, 0.75),
        (6, 12, 8, 13, 1.0),
    ];
    let mut img = vec![0.0; side * side];
    for r in 0..side {
        for c in 0..side {
            let (gr, gc) = (r * 16 / side, c * 16 / side);
            for &(r0, c0, r1, c1, v) in &RECTS {
                if (r0..r1).contains(&gr) && (c0..c1).contains(&gc) {
                    img[r * side + c] = v;
                }
            }
        }
    }
    img
}
