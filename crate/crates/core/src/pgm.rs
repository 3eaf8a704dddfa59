//! Binary portable graymap (P5) encoding.
//!
//! Files are written 8-bit with maxval 255 and the header `P5\n<w> <h>\n255\n`.
//! Intensities map linearly `[0, 1] ↔ [0, 255]`; values outside `[0, 1]` are
//! clamped and the result rounded half away from zero. Reading accepts any
//! maxval up to 255 and `#` comments in the header.

use crate::error::{Error, Result};
use crate::image::Image;

fn format_err(field: &'static str, message: impl Into<String>) -> Error {
    Error::ImageFormat {
        field,
        message: message.into(),
    }
}

/// Quantizes an intensity to a byte.
pub fn quantize(v: f64) -> u8 {
    (v.clamp(0.0, 1.0) * 255.0).round() as u8
}

pub fn encode(image: &Image) -> Vec<u8> {
    let header = format!("P5\n{} {}\n255\n", image.width(), image.height());
    let mut out = Vec::with_capacity(header.len() + image.len());
    out.extend_from_slice(header.as_bytes());
    out.extend(image.data().iter().map(|&v| quantize(v)));
    out
}

struct HeaderReader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> HeaderReader<'a> {
    fn skip_space_and_comments(&mut self) {
        while self.pos < self.bytes.len() {
            match self.bytes[self.pos] {
                b'#' => {
                    while self.pos < self.bytes.len() && self.bytes[self.pos] != b'\n' {
                        self.pos += 1;
                    }
                }
                c if c.is_ascii_whitespace() => self.pos += 1,
                _ => break,
            }
        }
    }

    fn token(&mut self, field: &'static str) -> Result<&'a str> {
        self.skip_space_and_comments();
        let start = self.pos;
        while self.pos < self.bytes.len() && !self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(format_err(field, "missing"));
        }
        std::str::from_utf8(&self.bytes[start..self.pos])
            .map_err(|_| format_err(field, "not valid ASCII"))
    }

    fn number(&mut self, field: &'static str) -> Result<usize> {
        let tok = self.token(field)?;
        tok.parse::<usize>()
            .map_err(|_| format_err(field, format!("expected a non-negative integer, got '{tok}'")))
    }
}

pub fn decode(bytes: &[u8]) -> Result<Image> {
    let mut r = HeaderReader { bytes, pos: 0 };
    let magic = r.token("magic")?;
    if magic != "P5" {
        return Err(format_err("magic", format!("expected 'P5', got '{magic}'")));
    }
    let width = r.number("width")?;
    if width == 0 {
        return Err(format_err("width", "must be positive"));
    }
    let height = r.number("height")?;
    if height == 0 {
        return Err(format_err("height", "must be positive"));
    }
    let maxval = r.number("maxval")?;
    if maxval == 0 || maxval > 255 {
        return Err(format_err(
            "maxval",
            format!("only 8-bit files are supported (1..=255), got {maxval}"),
        ));
    }
    // exactly one whitespace byte separates the header from the raster
    match bytes.get(r.pos) {
        Some(c) if c.is_ascii_whitespace() => r.pos += 1,
        _ => return Err(format_err("maxval", "missing whitespace after header")),
    }
    let n = width * height;
    let raster = &bytes[r.pos..];
    if raster.len() < n {
        return Err(format_err(
            "pixel data",
            format!("expected {n} bytes, found {}", raster.len()),
        ));
    }
    let scale = maxval as f64;
    let data = raster[..n]
        .iter()
        .map(|&b| {
            if b as usize > maxval {
                Err(format_err(
                    "pixel data",
                    format!("sample {b} exceeds maxval {maxval}"),
                ))
            } else {
                Ok(b as f64 / scale)
            }
        })
        .collect::<Result<Vec<f64>>>()?;
    Image::new(width, height, data)
}

pub fn read(path: impl AsRef<std::path::Path>) -> std::io::Result<Result<Image>> {
    Ok(decode(&std::fs::read(path)?))
}

pub fn write(path: impl AsRef<std::path::Path>, image: &Image) -> std::io::Result<()> {
    std::fs::write(path, encode(image))
}
