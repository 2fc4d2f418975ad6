//! Figure-style overlays: masked pixels painted with a solid tint.

use crate::color::RgbPoint;
use crate::error::{Error, Result};
use crate::image::{Mask, RasterImage};

pub const RED: RgbPoint = RgbPoint::new(255.0, 0.0, 0.0);
pub const GREEN: RgbPoint = RgbPoint::new(0.0, 255.0, 0.0);

/// Replaces masked pixels by `tint` at full opacity.
pub fn render_overlay(image: &RasterImage, mask: &Mask, tint: RgbPoint) -> Result<RasterImage> {
    if !mask.same_shape(image) {
        return Err(Error::MismatchedDimensions {
            expected: format!("{}x{}", image.width(), image.height()),
            found: format!("{}x{}", mask.width(), mask.height()),
        });
    }
    let pixels = image
        .pixels()
        .iter()
        .zip(mask.bits())
        .map(|(p, m)| if *m { tint } else { *p })
        .collect();
    RasterImage::new(image.width(), image.height(), pixels)
}

/// Detection overlay: non-conforming pixels red, conforming pixels outside
/// accepted regions green, accepted material untouched.
pub fn detection_overlay(
    image: &RasterImage,
    conforming: &Mask,
    accepted: &Mask,
) -> Result<RasterImage> {
    let outliers = Mask::new(
        conforming.width(),
        conforming.height(),
        conforming.bits().iter().map(|b| !b).collect(),
    )?;
    let rejected = Mask::new(
        conforming.width(),
        conforming.height(),
        conforming
            .bits()
            .iter()
            .zip(accepted.bits())
            .map(|(c, a)| *c && !a)
            .collect(),
    )?;
    render_overlay(&render_overlay(image, &outliers, RED)?, &rejected, GREEN)
}
