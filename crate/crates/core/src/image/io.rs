//! Binary PGM (P5) read/write and grayscale PNG read.

use std::fs;
use std::io::Cursor;
use std::path::Path;

use super::{Image, ImageError};

const PNG_MAGIC: &[u8] = b"\x89PNG\r\n\x1a\n";

/// Reads a P5 PGM or an 8-bit grayscale PNG, selected by file signature.
pub fn read_image(path: impl AsRef<Path>) -> Result<Image, ImageError> {
    let bytes = fs::read(path)?;
    if bytes.starts_with(PNG_MAGIC) {
        decode_png(&bytes)
    } else {
        decode_pgm(&bytes)
    }
}

/// Writes `img` as binary PGM with maxval `2^q - 1`.
pub fn write_image(img: &Image, path: impl AsRef<Path>) -> Result<(), ImageError> {
    fs::write(path, encode_pgm(img))?;
    Ok(())
}

pub fn encode_pgm(img: &Image) -> Vec<u8> {
    let mut out = format!(
        "P5\n{} {}\n{}\n",
        img.width(),
        img.height(),
        img.max_value()
    )
    .into_bytes();
    out.extend_from_slice(img.pixels());
    out
}

struct Header<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl Header<'_> {
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

    fn number(&mut self, what: &str) -> Result<usize, ImageError> {
        self.skip_space_and_comments();
        let start = self.pos;
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(ImageError::Parse(format!("expected {what}")));
        }
        std::str::from_utf8(&self.bytes[start..self.pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| ImageError::Parse(format!("invalid {what}")))
    }
}

pub fn decode_pgm(bytes: &[u8]) -> Result<Image, ImageError> {
    if !bytes.starts_with(b"P5") {
        return Err(ImageError::Parse("missing P5 signature".into()));
    }
    let mut h = Header { bytes, pos: 2 };
    let width = h.number("width")?;
    let height = h.number("height")?;
    let maxval = h.number("maxval")?;
    if maxval == 0 || maxval > 65535 {
        return Err(ImageError::Parse(format!("invalid maxval {maxval}")));
    }
    if maxval > 255 {
        return Err(ImageError::UnsupportedBitDepth(16));
    }
    // maxval must be 2^q - 1 so the bit depth is well defined.
    let bit_depth = (maxval as u32 + 1).trailing_zeros();
    if (1usize << bit_depth) != maxval + 1 {
        return Err(ImageError::Parse(format!("maxval {maxval} is not 2^q - 1")));
    }
    match bytes.get(h.pos) {
        Some(c) if c.is_ascii_whitespace() => h.pos += 1,
        _ => return Err(ImageError::Parse("missing whitespace after header".into())),
    }
    let n = width
        .checked_mul(height)
        .ok_or_else(|| ImageError::Parse("dimensions overflow".into()))?;
    let raster = &bytes[h.pos..];
    if raster.len() < n {
        return Err(ImageError::Parse(format!(
            "truncated raster: {} of {n} bytes",
            raster.len()
        )));
    }
    Image::new(width, height, bit_depth as u8, raster[..n].to_vec())
}

fn decode_png(bytes: &[u8]) -> Result<Image, ImageError> {
    let decoder = png::Decoder::new(Cursor::new(bytes));
    let mut reader = decoder
        .read_info()
        .map_err(|e| ImageError::Parse(e.to_string()))?;
    let (color, depth) = reader.output_color_type();
    if color != png::ColorType::Grayscale {
        return Err(ImageError::Parse(format!(
            "expected grayscale PNG, got {color:?}"
        )));
    }
    if depth != png::BitDepth::Eight {
        return Err(ImageError::UnsupportedBitDepth(depth as u32));
    }
    let size = reader
        .output_buffer_size()
        .ok_or_else(|| ImageError::Parse("PNG too large".into()))?;
    let mut buf = vec![0; size];
    let info = reader
        .next_frame(&mut buf)
        .map_err(|e| ImageError::Parse(e.to_string()))?;
    let (w, h) = (info.width as usize, info.height as usize);
    let mut pixels = Vec::with_capacity(w * h);
    for row in buf.chunks(info.line_size).take(h) {
        pixels.extend_from_slice(&row[..w]);
    }
    Image::new(w, h, 8, pixels)
}
