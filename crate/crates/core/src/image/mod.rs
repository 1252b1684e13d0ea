//! Grayscale image container shared by the classical and quantum paths.

mod io;

pub use io::{decode_pgm, encode_pgm, read_image, write_image};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum ImageError {
    #[error("image must be nonempty, got {width}x{height}")]
    Empty { width: usize, height: usize },
    #[error("pixel buffer has {actual} entries, expected {expected}")]
    BufferSize { expected: usize, actual: usize },
    #[error("unsupported bit depth {0}")]
    UnsupportedBitDepth(u32),
    #[error("pixel value {value} at index {index} exceeds {max}")]
    ValueOutOfRange { index: usize, value: u8, max: u8 },
    #[error("dimension mismatch: {0}x{1} vs {2}x{3}")]
    DimensionMismatch(usize, usize, usize, usize),
    #[error("crop {w}x{h} at ({x},{y}) exceeds {width}x{height}")]
    CropOutOfBounds {
        x: usize,
        y: usize,
        w: usize,
        h: usize,
        width: usize,
        height: usize,
    },
    #[error("malformed image file: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Largest value representable with `bit_depth` bits.
pub fn max_value(bit_depth: u8) -> u8 {
    ((1u16 << bit_depth) - 1) as u8
}

/// Saturating clamp of an integer intensity into `[0, 2^q - 1]`.
pub fn clamp_pixel(value: i64, bit_depth: u8) -> u8 {
    value.clamp(0, max_value(bit_depth) as i64) as u8
}

/// Rounds (half away from zero) and clamps a real intensity into `[0, 2^q - 1]`.
pub fn clamp_pixel_f64(value: f64, bit_depth: u8) -> u8 {
    if value.is_nan() {
        return 0;
    }
    value.round().clamp(0.0, max_value(bit_depth) as f64) as u8
}

/// Row-major grid of unsigned intensities with `bit_depth` bits per pixel.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Image {
    width: usize,
    height: usize,
    bit_depth: u8,
    pixels: Vec<u8>,
}

impl Image {
    pub fn new(
        width: usize,
        height: usize,
        bit_depth: u8,
        pixels: Vec<u8>,
    ) -> Result<Self, ImageError> {
        if width == 0 || height == 0 {
            return Err(ImageError::Empty { width, height });
        }
        if !(1..=8).contains(&bit_depth) {
            return Err(ImageError::UnsupportedBitDepth(bit_depth as u32));
        }
        if pixels.len() != width * height {
            return Err(ImageError::BufferSize {
                expected: width * height,
                actual: pixels.len(),
            });
        }
        let max = max_value(bit_depth);
        if let Some((index, &value)) = pixels.iter().enumerate().find(|(_, &v)| v > max) {
            return Err(ImageError::ValueOutOfRange { index, value, max });
        }
        Ok(Self {
            width,
            height,
            bit_depth,
            pixels,
        })
    }

    pub fn filled(
        width: usize,
        height: usize,
        bit_depth: u8,
        value: u8,
    ) -> Result<Self, ImageError> {
        Self::new(width, height, bit_depth, vec![value; width * height])
    }

    /// Builds an image from `f(x, y)`; values are clamped to the bit depth.
    pub fn from_fn(
        width: usize,
        height: usize,
        bit_depth: u8,
        mut f: impl FnMut(usize, usize) -> u8,
    ) -> Result<Self, ImageError> {
        let max = if (1..=8).contains(&bit_depth) {
            max_value(bit_depth)
        } else {
            255
        };
        let mut pixels = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                pixels.push(f(x, y).min(max));
            }
        }
        Self::new(width, height, bit_depth, pixels)
    }

    /// Builds an image from rows of pixels.
    pub fn from_rows<R: AsRef<[u8]>>(bit_depth: u8, rows: &[R]) -> Result<Self, ImageError> {
        let height = rows.len();
        let width = rows.first().map_or(0, |r| r.as_ref().len());
        let mut pixels = Vec::with_capacity(width * height);
        for row in rows {
            let row = row.as_ref();
            if row.len() != width {
                return Err(ImageError::BufferSize {
                    expected: width,
                    actual: row.len(),
                });
            }
            pixels.extend_from_slice(row);
        }
        Self::new(width, height, bit_depth, pixels)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn bit_depth(&self) -> u8 {
        self.bit_depth
    }

    pub fn max_value(&self) -> u8 {
        max_value(self.bit_depth)
    }

    /// Number of pixels.
    pub fn len(&self) -> usize {
        self.pixels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pixels.is_empty()
    }

    pub fn pixels(&self) -> &[u8] {
        &self.pixels
    }

    pub fn into_pixels(self) -> Vec<u8> {
        self.pixels
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> u8 {
        self.pixels[y * self.width + x]
    }

    /// Pixel at `(x, y)` with coordinates clamped into the grid (edge replication).
    #[inline]
    pub fn get_clamped(&self, x: isize, y: isize) -> u8 {
        let x = x.clamp(0, self.width as isize - 1) as usize;
        let y = y.clamp(0, self.height as isize - 1) as usize;
        self.get(x, y)
    }

    pub fn same_shape(&self, other: &Image) -> Result<(), ImageError> {
        if self.width != other.width || self.height != other.height {
            return Err(ImageError::DimensionMismatch(
                self.width,
                self.height,
                other.width,
                other.height,
            ));
        }
        Ok(())
    }

    pub fn crop(&self, x: usize, y: usize, w: usize, h: usize) -> Result<Image, ImageError> {
        if w == 0 || h == 0 || x + w > self.width || y + h > self.height {
            return Err(ImageError::CropOutOfBounds {
                x,
                y,
                w,
                h,
                width: self.width,
                height: self.height,
            });
        }
        Image::from_fn(w, h, self.bit_depth, |cx, cy| self.get(x + cx, y + cy))
    }

    /// Centered crop, used to scale down experiments.
    pub fn crop_center(&self, w: usize, h: usize) -> Result<Image, ImageError> {
        let x = self.width.saturating_sub(w) / 2;
        let y = self.height.saturating_sub(h) / 2;
        self.crop(x, y, w.min(self.width), h.min(self.height))
    }

    pub fn rows(&self) -> impl Iterator<Item = &[u8]> {
        self.pixels.chunks(self.width)
    }
}

/// An image surrounded by a one-pixel border.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PaddedImage {
    full: Image,
}

impl PaddedImage {
    /// The padded grid, `(width + 2) x (height + 2)`.
    pub fn full(&self) -> &Image {
        &self.full
    }

    pub fn inner_width(&self) -> usize {
        self.full.width - 2
    }

    pub fn inner_height(&self) -> usize {
        self.full.height - 2
    }

    /// Recovers the source image.
    pub fn interior(&self) -> Image {
        self.full
            .crop(1, 1, self.inner_width(), self.inner_height())
            .expect("padded image always has an interior")
    }
}

/// Adds a one-pixel border filled by edge replication.
pub fn pad(img: &Image) -> PaddedImage {
    let full = Image::from_fn(img.width + 2, img.height + 2, img.bit_depth, |x, y| {
        img.get_clamped(x as isize - 1, y as isize - 1)
    })
    .expect("padding a valid image yields a valid image");
    PaddedImage { full }
}
