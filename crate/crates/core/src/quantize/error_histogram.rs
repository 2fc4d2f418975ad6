use super::Palette;
use crate::error::{Error, Result};
use crate::image::RasterImage;
use std::fmt::Write;

/// Distribution of per-pixel Euclidean reconstruction error.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorHistogram {
    pub bin_width: f64,
    /// Fraction of pixels per bin; bin `i` covers `[i·w, (i+1)·w)`.
    pub bins: Vec<f64>,
    pub mean_error: f64,
    pub max_error: f64,
}

impl ErrorHistogram {
    /// Fraction of pixels whose error is strictly below `threshold`,
    /// counting whole bins only (exact when `threshold` is a bin edge).
    pub fn fraction_below(&self, threshold: f64) -> f64 {
        let n = (threshold / self.bin_width).floor() as usize;
        self.bins.iter().take(n).sum()
    }

    /// `bin_start,fraction` rows with a header line.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("bin_start,fraction\n");
        for (i, f) in self.bins.iter().enumerate() {
            let _ = writeln!(s, "{},{}", i as f64 * self.bin_width, f);
        }
        s
    }
}

pub fn error_histogram(image: &RasterImage, palette: &Palette) -> Result<ErrorHistogram> {
    error_histogram_with_bin(image, palette, 1.0)
}

pub fn error_histogram_with_bin(
    image: &RasterImage,
    palette: &Palette,
    bin_width: f64,
) -> Result<ErrorHistogram> {
    if !(bin_width > 0.0 && bin_width.is_finite()) {
        return Err(Error::InvalidParameter(format!("bin width {bin_width}")));
    }
    if palette.assignment().len() != image.len() {
        return Err(Error::MismatchedDimensions {
            expected: format!("{} assignments", image.len()),
            found: format!("{} assignments", palette.assignment().len()),
        });
    }
    let errors: Vec<f64> = image
        .pixels()
        .iter()
        .zip(palette.assignment())
        .map(|(p, &a)| p.distance(palette.colors()[a as usize]))
        .collect();
    let max_error = errors.iter().copied().fold(0.0, f64::max);
    let n_bins = (max_error / bin_width).floor() as usize + 1;
    let mut counts = vec![0usize; n_bins];
    for e in &errors {
        counts[((e / bin_width).floor() as usize).min(n_bins - 1)] += 1;
    }
    let total = errors.len() as f64;
    Ok(ErrorHistogram {
        bin_width,
        bins: counts.iter().map(|c| *c as f64 / total).collect(),
        mean_error: errors.iter().sum::<f64>() / total,
        max_error,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::color::RgbPoint;
    use crate::quantize::{quantize, QuantizeMethod};

    #[test]
    fn single_color_has_no_error() {
        let img = RasterImage::filled(5, 5, RgbPoint::new(12.0, 34.0, 56.0)).unwrap();
        let pal = quantize(&img, QuantizeMethod::MinimumVariance, 256).unwrap();
        let h = error_histogram(&img, &pal).unwrap();
        assert_eq!(h.max_error, 0.0);
        assert_eq!(h.mean_error, 0.0);
        assert_eq!(h.bins, vec![1.0]);
    }

    #[test]
    fn mismatched_palette_is_rejected() {
        let img = RasterImage::filled(5, 5, RgbPoint::splat(9.0)).unwrap();
        let other = RasterImage::filled(2, 2, RgbPoint::splat(9.0)).unwrap();
        let pal = quantize(&other, QuantizeMethod::Octree, 4).unwrap();
        assert!(matches!(
            error_histogram(&img, &pal),
            Err(Error::MismatchedDimensions { .. })
        ));
    }

    #[test]
    fn bins_sum_to_one() {
        let px = (0..400)
            .map(|i| RgbPoint::new((i % 20) as f64 * 12.0, (i / 20) as f64 * 12.0, 7.0))
            .collect();
        let img = RasterImage::new(20, 20, px).unwrap();
        let pal = quantize(&img, QuantizeMethod::MedianCut, 6).unwrap();
        let h = error_histogram(&img, &pal).unwrap();
        assert!((h.bins.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        assert!(h.bins.iter().all(|f| *f >= 0.0));
        assert!(h.to_csv().starts_with("bin_start,fraction\n0,"));
    }
}
