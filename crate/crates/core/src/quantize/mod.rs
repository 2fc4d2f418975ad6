//! Palette quantization by four interchangeable algorithms, plus
//! reconstruction-error histograms.
//!
//! Every method works on the histogram of distinct colors, so results do not
//! depend on pixel order. All of them end with the same nearest-color
//! reassignment pass, which is what gives [`Palette`] its invariant.

mod error_histogram;
mod kmeans;
mod median_cut;
mod min_variance;
mod octree;

pub use error_histogram::{error_histogram, error_histogram_with_bin, ErrorHistogram};

use crate::color::RgbPoint;
use crate::error::{Error, Result};
use crate::image::RasterImage;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

pub const DEFAULT_PALETTE_SIZE: usize = 256;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum QuantizeMethod {
    MinimumVariance,
    MedianCut,
    Octree,
    KMeans,
}

impl QuantizeMethod {
    pub const ALL: [QuantizeMethod; 4] = [
        QuantizeMethod::MinimumVariance,
        QuantizeMethod::MedianCut,
        QuantizeMethod::Octree,
        QuantizeMethod::KMeans,
    ];

    pub fn id(self) -> &'static str {
        match self {
            QuantizeMethod::MinimumVariance => "minimum-variance",
            QuantizeMethod::MedianCut => "median-cut",
            QuantizeMethod::Octree => "octree",
            QuantizeMethod::KMeans => "k-means",
        }
    }
}

impl fmt::Display for QuantizeMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for QuantizeMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        QuantizeMethod::ALL
            .into_iter()
            .find(|m| m.id() == s)
            .ok_or_else(|| Error::UnsupportedMethod(s.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuantizeOptions {
    pub palette_size: usize,
    /// Only consulted by k-means, to reseed empty clusters.
    pub seed: u64,
}

impl Default for QuantizeOptions {
    fn default() -> Self {
        Self {
            palette_size: DEFAULT_PALETTE_SIZE,
            seed: 0,
        }
    }
}

/// Quantized color set with per-pixel assignment.
#[derive(Debug, Clone, PartialEq)]
pub struct Palette {
    colors: Vec<RgbPoint>,
    assignment: Vec<u32>,
    counts: Vec<usize>,
    method: QuantizeMethod,
}

impl Palette {
    pub fn colors(&self) -> &[RgbPoint] {
        &self.colors
    }

    pub fn assignment(&self) -> &[u32] {
        &self.assignment
    }

    pub fn counts(&self) -> &[usize] {
        &self.counts
    }

    pub fn method(&self) -> QuantizeMethod {
        self.method
    }

    pub fn len(&self) -> usize {
        self.colors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.colors.is_empty()
    }

    /// Pixel counts as real weights, for weighted fits.
    pub fn weights(&self) -> Vec<f64> {
        self.counts.iter().map(|c| *c as f64).collect()
    }

    /// The image with every pixel replaced by its palette color.
    pub fn reconstruct(&self, width: usize, height: usize) -> Result<RasterImage> {
        let pixels = self
            .assignment
            .iter()
            .map(|i| self.colors[*i as usize])
            .collect();
        RasterImage::new(width, height, pixels)
    }

    pub fn to_document(&self) -> PaletteDocument {
        PaletteDocument {
            method: self.method,
            colors: self
                .colors
                .iter()
                .zip(&self.counts)
                .map(|(c, n)| PaletteEntry { rgb: *c, count: *n })
                .collect(),
        }
    }
}

/// Export form of a palette: method plus RGB triples with pixel counts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PaletteDocument {
    pub method: QuantizeMethod,
    pub colors: Vec<PaletteEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PaletteEntry {
    pub rgb: RgbPoint,
    pub count: usize,
}

/// Distinct colors of an image with pixel tallies.
pub(crate) struct ColorHistogram {
    pub colors: Vec<RgbPoint>,
    pub counts: Vec<u64>,
    /// Histogram entry of each pixel.
    pub pixel_entry: Vec<u32>,
}

impl ColorHistogram {
    pub fn build(image: &RasterImage) -> Self {
        let pixels = image.pixels();
        let mut order: Vec<u32> = (0..pixels.len() as u32).collect();
        order.par_sort_unstable_by_key(|&i| (pixels[i as usize].bits(), i));
        let mut colors = Vec::new();
        let mut counts = Vec::new();
        let mut pixel_entry = vec![0u32; pixels.len()];
        let mut last = None;
        for i in order {
            let key = pixels[i as usize].bits();
            if last != Some(key) {
                colors.push(pixels[i as usize]);
                counts.push(0);
                last = Some(key);
            }
            *counts.last_mut().unwrap() += 1;
            pixel_entry[i as usize] = (colors.len() - 1) as u32;
        }
        Self {
            colors,
            counts,
            pixel_entry,
        }
    }

    pub fn len(&self) -> usize {
        self.colors.len()
    }
}

/// Quantizes `image` to at most `palette_size` colors with the default seed.
pub fn quantize(
    image: &RasterImage,
    method: QuantizeMethod,
    palette_size: usize,
) -> Result<Palette> {
    quantize_with(
        image,
        method,
        &QuantizeOptions {
            palette_size,
            ..Default::default()
        },
    )
}

pub fn quantize_with(
    image: &RasterImage,
    method: QuantizeMethod,
    options: &QuantizeOptions,
) -> Result<Palette> {
    if options.palette_size == 0 {
        return Err(Error::InvalidParameter(
            "palette size must be at least 1".into(),
        ));
    }
    if image.is_empty() {
        return Err(Error::InvalidImage("empty image".into()));
    }
    let hist = ColorHistogram::build(image);
    let k = options.palette_size;
    let centroids = if hist.len() <= k {
        hist.colors.clone()
    } else {
        match method {
            QuantizeMethod::MinimumVariance => min_variance::palette(&hist, k),
            QuantizeMethod::MedianCut => median_cut::palette(&hist, k),
            QuantizeMethod::Octree => octree::palette(&hist, k),
            QuantizeMethod::KMeans => kmeans::palette(&hist, k, options.seed),
        }
    };
    Ok(finalize(&hist, centroids, method))
}

/// Index of the nearest color (lowest index on ties).
pub(crate) fn nearest(colors: &[RgbPoint], p: RgbPoint) -> usize {
    let mut best = 0;
    let mut best_d = f64::INFINITY;
    for (i, c) in colors.iter().enumerate() {
        let d = c.distance_squared(p);
        if d < best_d {
            best_d = d;
            best = i;
        }
    }
    best
}

/// Nearest-color reassignment; colors that receive no pixel are dropped.
fn finalize(hist: &ColorHistogram, centroids: Vec<RgbPoint>, method: QuantizeMethod) -> Palette {
    let entry_to_centroid: Vec<usize> = hist
        .colors
        .par_iter()
        .map(|c| nearest(&centroids, *c))
        .collect();
    let mut used = vec![0usize; centroids.len()];
    for (e, &c) in entry_to_centroid.iter().enumerate() {
        used[c] += hist.counts[e] as usize;
    }
    let mut remap = vec![u32::MAX; centroids.len()];
    let mut colors = Vec::new();
    let mut counts = Vec::new();
    for (i, c) in centroids.iter().enumerate() {
        if used[i] > 0 {
            remap[i] = colors.len() as u32;
            colors.push(*c);
            counts.push(used[i]);
        }
    }
    let assignment = hist
        .pixel_entry
        .iter()
        .map(|&e| remap[entry_to_centroid[e as usize]])
        .collect();
    Palette {
        colors,
        assignment,
        counts,
        method,
    }
}

/// Axis-aligned group of histogram entries shared by the box-splitting methods.
#[derive(Debug, Clone)]
pub(crate) struct ColorBox {
    pub entries: Vec<u32>,
}

impl ColorBox {
    pub fn weighted_mean(&self, hist: &ColorHistogram) -> RgbPoint {
        let mut sum = RgbPoint::ZERO;
        let mut w = 0.0;
        for &e in &self.entries {
            let n = hist.counts[e as usize] as f64;
            sum += hist.colors[e as usize] * n;
            w += n;
        }
        sum / w
    }

    /// Entries sorted along `axis` (histogram order breaks ties).
    pub fn sorted_along(&self, hist: &ColorHistogram, axis: usize) -> Vec<u32> {
        let mut v = self.entries.clone();
        v.sort_by(|&a, &b| {
            hist.colors[a as usize]
                .component(axis)
                .total_cmp(&hist.colors[b as usize].component(axis))
                .then(a.cmp(&b))
        });
        v
    }

    pub fn range(&self, hist: &ColorHistogram, axis: usize) -> f64 {
        let (lo, hi) =
            self.entries
                .iter()
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &e| {
                    let c = hist.colors[e as usize].component(axis);
                    (lo.min(c), hi.max(c))
                });
        hi - lo
    }

    pub fn is_splittable(&self) -> bool {
        self.entries.len() >= 2
    }
}
