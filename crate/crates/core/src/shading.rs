//! Shading-change versus reflectance-change classification from the
//! planarity measure, and a Lambertian renderer that produces pure
//! shading-change images.
//!
//! Under a Lambertian model every channel is the same shading image scaled by
//! that channel's albedo, so the colors of a uniform-albedo surface lie on a
//! line through the RGB origin.

use crate::color::{RgbPoint, CHANNEL_MAX};
use crate::error::{Error, Result};
use crate::image::RasterImage;
use crate::spectral::{covariance_eigen, fit_line_through_origin, PlanarityMeasure};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Variation {
    Shading,
    Reflectance,
    Ambiguous,
}

/// Cutoffs on `v1` (percent).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct ShadingThresholds {
    /// `v1` at or above this is shading-change.
    pub shading_min_v1: f64,
    /// `v1` strictly below this is reflectance-change.
    pub reflectance_max_v1: f64,
}

impl Default for ShadingThresholds {
    fn default() -> Self {
        Self {
            shading_min_v1: 96.0,
            reflectance_max_v1: 89.0,
        }
    }
}

impl ShadingThresholds {
    pub fn validate(&self) -> Result<()> {
        let ok = (0.0..=100.0).contains(&self.reflectance_max_v1)
            && (0.0..=100.0).contains(&self.shading_min_v1)
            && self.reflectance_max_v1 <= self.shading_min_v1;
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!(
                "thresholds need 0 <= reflectance ({}) <= shading ({}) <= 100",
                self.reflectance_max_v1, self.shading_min_v1
            )))
        }
    }

    pub fn label(&self, pm: &PlanarityMeasure) -> Variation {
        if pm.v1 >= self.shading_min_v1 {
            Variation::Shading
        } else if pm.v1 < self.reflectance_max_v1 {
            Variation::Reflectance
        } else {
            Variation::Ambiguous
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct VariationLabel {
    pub label: Variation,
    pub pm: PlanarityMeasure,
    /// RMS distance to the best line through the origin; diagnostic only.
    pub line_residual: f64,
}

pub fn classify_variation(points: &[RgbPoint]) -> Result<VariationLabel> {
    classify_variation_with(points, &ShadingThresholds::default())
}

pub fn classify_variation_with(
    points: &[RgbPoint],
    thresholds: &ShadingThresholds,
) -> Result<VariationLabel> {
    thresholds.validate()?;
    let pm = covariance_eigen(points)?.planarity();
    let line_residual = fit_line_through_origin(points)?.rms_residual;
    Ok(VariationLabel {
        label: thresholds.label(&pm),
        pm,
        line_residual,
    })
}

/// A uniform-albedo surface under one distant light.
#[derive(Debug, Clone, PartialEq)]
pub struct LambertianScene {
    /// Per-channel albedo in `(0, 1]`.
    pub albedo: [f64; 3],
    /// Flux density of the source.
    pub flux: f64,
    pub light_direction: [f64; 3],
    pub width: usize,
    pub height: usize,
    /// Unit surface normal per pixel, row-major.
    pub normals: Vec<[f64; 3]>,
}

fn dot3(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

impl LambertianScene {
    pub fn validate(&self) -> Result<()> {
        if self.albedo.iter().any(|a| !(*a > 0.0 && *a <= 1.0)) {
            return Err(Error::InvalidParameter(format!(
                "albedo {:?} outside (0, 1]",
                self.albedo
            )));
        }
        if !(self.flux > 0.0 && self.flux.is_finite()) {
            return Err(Error::InvalidParameter(format!("flux {}", self.flux)));
        }
        let unit = |v: [f64; 3]| (dot3(v, v).sqrt() - 1.0).abs() <= 1e-6;
        if !unit(self.light_direction) {
            return Err(Error::InvalidParameter(
                "light direction is not unit length".into(),
            ));
        }
        if self.width == 0 || self.height == 0 || self.normals.len() != self.width * self.height {
            return Err(Error::MismatchedDimensions {
                expected: format!("{}x{} normals", self.width, self.height),
                found: format!("{} normals", self.normals.len()),
            });
        }
        if let Some(i) = self.normals.iter().position(|n| !unit(*n)) {
            return Err(Error::InvalidParameter(format!(
                "normal {i} is not unit length"
            )));
        }
        Ok(())
    }

    /// Shading value `F · max(0, N_S · N_L)` at pixel `i`.
    pub fn shading(&self, i: usize) -> f64 {
        self.flux * dot3(self.normals[i], self.light_direction).max(0.0)
    }
}

/// Renders `channel = clamp(shading · albedo · 255)` without rounding.
pub fn synthesize_lambertian(scene: &LambertianScene) -> Result<RasterImage> {
    scene.validate()?;
    let a = scene.albedo;
    let pixels = (0..scene.normals.len())
        .into_par_iter()
        .map(|i| {
            let l = scene.shading(i) * CHANNEL_MAX;
            RgbPoint::new(l * a[0], l * a[1], l * a[2]).clamped()
        })
        .collect();
    RasterImage::new(scene.width, scene.height, pixels)
}
