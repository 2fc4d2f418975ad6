//! In-memory raster types: real-valued RGB images and boolean pixel masks.

use crate::color::RgbPoint;
use crate::error::{Error, Result};

/// Row-major RGB raster with real-valued channels in `[0, 255]`.
#[derive(Debug, Clone, PartialEq)]
pub struct RasterImage {
    width: usize,
    height: usize,
    pixels: Vec<RgbPoint>,
}

impl RasterImage {
    pub fn new(width: usize, height: usize, pixels: Vec<RgbPoint>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidImage(format!("empty image {width}x{height}")));
        }
        if pixels.len() != width * height {
            return Err(Error::MismatchedDimensions {
                expected: format!("{} pixels", width * height),
                found: format!("{} pixels", pixels.len()),
            });
        }
        if let Some(i) = pixels
            .iter()
            .position(|p| !p.is_finite() || !p.in_cube(0.0))
        {
            return Err(Error::InvalidImage(format!(
                "pixel {i} = {:?} outside [0, 255]",
                pixels[i]
            )));
        }
        Ok(Self {
            width,
            height,
            pixels,
        })
    }

    /// Builds an image from interleaved 8-bit RGB samples.
    pub fn from_rgb8(width: usize, height: usize, data: &[u8]) -> Result<Self> {
        if data.len() != width * height * 3 {
            return Err(Error::MismatchedDimensions {
                expected: format!("{} bytes", width * height * 3),
                found: format!("{} bytes", data.len()),
            });
        }
        let pixels = data
            .chunks_exact(3)
            .map(|c| RgbPoint::from_rgb8([c[0], c[1], c[2]]))
            .collect();
        Self::new(width, height, pixels)
    }

    pub fn filled(width: usize, height: usize, color: RgbPoint) -> Result<Self> {
        Self::new(width, height, vec![color; width * height])
    }

    /// Interleaved 8-bit RGB samples (rounded, clamped).
    pub fn to_rgb8(&self) -> Vec<u8> {
        self.pixels.iter().flat_map(|p| p.to_rgb8()).collect()
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn len(&self) -> usize {
        self.pixels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pixels.is_empty()
    }

    pub fn pixels(&self) -> &[RgbPoint] {
        &self.pixels
    }

    pub fn get(&self, x: usize, y: usize) -> RgbPoint {
        self.pixels[y * self.width + x]
    }

    /// Sub-image `[x0, x0+w) × [y0, y0+h)`.
    pub fn crop(&self, x0: usize, y0: usize, w: usize, h: usize) -> Result<Self> {
        if w == 0 || h == 0 || x0 + w > self.width || y0 + h > self.height {
            return Err(Error::InvalidParameter(format!(
                "crop {w}x{h}+{x0}+{y0} outside {}x{}",
                self.width, self.height
            )));
        }
        let pixels = (y0..y0 + h)
            .flat_map(|y| (x0..x0 + w).map(move |x| (x, y)))
            .map(|(x, y)| self.get(x, y))
            .collect();
        Ok(Self {
            width: w,
            height: h,
            pixels,
        })
    }

    /// Same size and content with pixels replaced through `f`.
    pub fn map_pixels(&self, f: impl Fn(RgbPoint) -> RgbPoint) -> Result<Self> {
        Self::new(
            self.width,
            self.height,
            self.pixels.iter().map(|p| f(*p)).collect(),
        )
    }

    /// Megapixels, for input-size guidance.
    pub fn megapixels(&self) -> f64 {
        self.pixels.len() as f64 / 1e6
    }
}

/// Per-pixel boolean grid with the dimensions of an image.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mask {
    width: usize,
    height: usize,
    bits: Vec<bool>,
}

impl Mask {
    pub fn new(width: usize, height: usize, bits: Vec<bool>) -> Result<Self> {
        if bits.len() != width * height {
            return Err(Error::MismatchedDimensions {
                expected: format!("{} cells", width * height),
                found: format!("{} cells", bits.len()),
            });
        }
        Ok(Self {
            width,
            height,
            bits,
        })
    }

    pub fn empty(width: usize, height: usize) -> Self {
        Self {
            width,
            height,
            bits: vec![false; width * height],
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn get(&self, x: usize, y: usize) -> bool {
        self.bits[y * self.width + x]
    }

    pub fn set(&mut self, x: usize, y: usize, v: bool) {
        self.bits[y * self.width + x] = v;
    }

    pub fn count(&self) -> usize {
        self.bits.iter().filter(|b| **b).count()
    }

    /// Fraction of `true` cells.
    pub fn fraction(&self) -> f64 {
        if self.bits.is_empty() {
            0.0
        } else {
            self.count() as f64 / self.bits.len() as f64
        }
    }

    pub fn same_shape(&self, image: &RasterImage) -> bool {
        self.width == image.width() && self.height == image.height()
    }

    /// 8-bit grayscale rendering (255 for set cells).
    pub fn to_luma8(&self) -> Vec<u8> {
        self.bits.iter().map(|b| if *b { 255 } else { 0 }).collect()
    }
}
