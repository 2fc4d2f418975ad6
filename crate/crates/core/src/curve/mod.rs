//! The planar cubic color model: a best-fit plane through the palette plus a
//! cubic `v = p(u)` in that plane's coordinates, sampled as a polyline.

mod document;

pub use document::{deserialize_model, serialize_model, MODEL_VERSION};

use crate::color::RgbPoint;
use crate::error::{Error, Result};
use crate::image::{Mask, RasterImage};
use crate::polyfit::{fit_polynomial, Polynomial};
use crate::quantize::Palette;
use crate::spectral::{covariance_eigen_weighted, plane_from_eigen, PlanarityMeasure, PlaneFrame};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;

/// Conformity threshold d_t, RGB units.
pub const DEFAULT_DISTANCE_THRESHOLD: f64 = 25.0;
pub const DEFAULT_SAMPLE_COUNT: usize = 512;
pub const DEFAULT_EXTRAPOLATION: f64 = 0.10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurveConfig {
    /// Fraction of the observed u-range added on each side.
    pub extrapolation_fraction: f64,
    pub sample_count: usize,
    /// Keep only samples inside the RGB cube inflated by `cube_margin`.
    pub trim_to_cube: bool,
    pub cube_margin: f64,
    /// Weight palette colors by pixel count in the plane and curve fits.
    pub weighted: bool,
}

impl Default for CurveConfig {
    fn default() -> Self {
        Self {
            extrapolation_fraction: DEFAULT_EXTRAPOLATION,
            sample_count: DEFAULT_SAMPLE_COUNT,
            trim_to_cube: true,
            cube_margin: DEFAULT_DISTANCE_THRESHOLD,
            weighted: false,
        }
    }
}

impl CurveConfig {
    fn validate(&self) -> Result<()> {
        if !(self.extrapolation_fraction >= 0.0 && self.extrapolation_fraction.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "extrapolation fraction {}",
                self.extrapolation_fraction
            )));
        }
        if self.sample_count < 2 {
            return Err(Error::InvalidParameter(
                "need at least 2 curve samples".into(),
            ));
        }
        if !(self.cube_margin >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "cube margin {}",
                self.cube_margin
            )));
        }
        Ok(())
    }
}

/// Where a model came from; carried through the model document.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct Provenance {
    pub source_hash: String,
    pub quantizer: String,
    pub palette_size: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CurveModel {
    plane: PlaneFrame,
    coefficients: [f64; 4],
    u_domain: [f64; 2],
    samples: Vec<RgbPoint>,
    arc_length: f64,
    planarity: PlanarityMeasure,
    provenance: Option<Provenance>,
}

/// Nearest curve sample to a query color.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurveDistance {
    pub distance: f64,
    pub nearest_sample_index: usize,
    pub nearest_point: RgbPoint,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutlierMask {
    pub mask: Mask,
    pub outlier_fraction: f64,
}

impl CurveModel {
    /// Builds a model and its polyline from the defining parameters.
    pub fn from_parts(
        plane: PlaneFrame,
        coefficients: [f64; 4],
        u_domain: [f64; 2],
        sample_count: usize,
        planarity: PlanarityMeasure,
        provenance: Option<Provenance>,
    ) -> Result<Self> {
        if sample_count < 2 {
            return Err(Error::InvalidParameter(
                "need at least 2 curve samples".into(),
            ));
        }
        if !(u_domain[0] < u_domain[1]) || !u_domain.iter().all(|u| u.is_finite()) {
            return Err(Error::InvalidParameter(format!("u domain {u_domain:?}")));
        }
        if !coefficients.iter().all(|c| c.is_finite()) {
            return Err(Error::InvalidParameter("non-finite coefficient".into()));
        }
        let mut model = Self {
            plane,
            coefficients,
            u_domain,
            samples: Vec::new(),
            arc_length: 0.0,
            planarity,
            provenance,
        };
        let step = (u_domain[1] - u_domain[0]) / (sample_count - 1) as f64;
        model.samples = (0..sample_count)
            .map(|i| {
                let u = if i == sample_count - 1 {
                    u_domain[1]
                } else {
                    u_domain[0] + step * i as f64
                };
                model.point_at(u)
            })
            .collect();
        model.arc_length = polyline_length(&model.samples);
        Ok(model)
    }

    pub fn plane(&self) -> &PlaneFrame {
        &self.plane
    }

    pub fn coefficients(&self) -> [f64; 4] {
        self.coefficients
    }

    pub fn u_domain(&self) -> [f64; 2] {
        self.u_domain
    }

    pub fn samples(&self) -> &[RgbPoint] {
        &self.samples
    }

    pub fn arc_length(&self) -> f64 {
        self.arc_length
    }

    pub fn planarity(&self) -> PlanarityMeasure {
        self.planarity
    }

    pub fn provenance(&self) -> Option<&Provenance> {
        self.provenance.as_ref()
    }

    pub fn with_provenance(mut self, provenance: Provenance) -> Self {
        self.provenance = Some(provenance);
        self
    }

    pub fn polynomial(&self) -> Polynomial {
        Polynomial::new(self.coefficients.to_vec())
    }

    /// In-plane ordinate `p(u)`.
    pub fn eval(&self, u: f64) -> f64 {
        let [a0, a1, a2, a3] = self.coefficients;
        ((a3 * u + a2) * u + a1) * u + a0
    }

    /// The 3D curve point at parameter `u`.
    pub fn point_at(&self, u: f64) -> RgbPoint {
        self.plane.point_at(u, self.eval(u))
    }

    /// Length of polyline segment `i` (between samples `i` and `i+1`).
    pub fn segment_length(&self, i: usize) -> f64 {
        self.samples[i].distance(self.samples[i + 1])
    }

    /// Largest distance between adjacent samples (`h`); nearest-sample
    /// distances overestimate the true curve distance by at most `h/2`.
    pub fn max_sample_spacing(&self) -> f64 {
        (0..self.samples.len() - 1)
            .map(|i| self.segment_length(i))
            .fold(0.0, f64::max)
    }

    /// Same curve with the in-plane u-axis reversed.
    pub fn reflected(&self) -> Result<Self> {
        let plane = PlaneFrame {
            origin: self.plane.origin,
            axis_u: -self.plane.axis_u,
            axis_v: self.plane.axis_v,
            normal: -self.plane.normal,
        };
        let [a0, a1, a2, a3] = self.coefficients;
        Self::from_parts(
            plane,
            [a0, -a1, a2, -a3],
            [-self.u_domain[1], -self.u_domain[0]],
            self.samples.len(),
            self.planarity,
            self.provenance.clone(),
        )
    }

    pub fn distance(&self, query: RgbPoint) -> CurveDistance {
        distance_to_curve(query, self)
    }

    /// Nearest-sample results for many colors. Identical colors are
    /// evaluated once.
    pub fn distances(&self, points: &[RgbPoint]) -> Vec<CurveDistance> {
        let mut unique: HashMap<[u64; 3], usize> = HashMap::new();
        let mut keys = Vec::new();
        let slot: Vec<usize> = points
            .iter()
            .map(|p| {
                *unique.entry(p.bits()).or_insert_with(|| {
                    keys.push(*p);
                    keys.len() - 1
                })
            })
            .collect();
        let solved: Vec<CurveDistance> = keys.par_iter().map(|p| self.distance(*p)).collect();
        slot.into_iter().map(|i| solved[i]).collect()
    }

    /// In-plane residual statistics of `points` against the cubic.
    pub fn residuals(&self, points: &[RgbPoint]) -> ResidualStats {
        let mut ss = 0.0;
        let mut max = 0.0f64;
        for p in points {
            let (u, v, _) = self.plane.project(*p);
            let r = v - self.eval(u);
            ss += r * r;
            max = max.max(r.abs());
        }
        ResidualStats {
            rms: (ss / points.len().max(1) as f64).sqrt(),
            max,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResidualStats {
    pub rms: f64,
    pub max: f64,
}

pub(crate) fn polyline_length(samples: &[RgbPoint]) -> f64 {
    samples.windows(2).map(|w| w[0].distance(w[1])).sum()
}

/// Fits the model to a palette's colors with the default configuration.
pub fn fit_curve(palette: &Palette) -> Result<CurveModel> {
    fit_curve_with(palette, &CurveConfig::default())
}

pub fn fit_curve_with(palette: &Palette, config: &CurveConfig) -> Result<CurveModel> {
    let weights = config.weighted.then(|| palette.weights());
    let model = fit_curve_points(palette.colors(), weights.as_deref(), config)?;
    Ok(model.with_provenance(Provenance {
        source_hash: String::new(),
        quantizer: palette.method().id().to_string(),
        palette_size: palette.len(),
    }))
}

/// Fits the model to arbitrary colors (plane, then cubic in plane coordinates).
pub fn fit_curve_points(
    points: &[RgbPoint],
    weights: Option<&[f64]>,
    config: &CurveConfig,
) -> Result<CurveModel> {
    config.validate()?;
    if points.len() < 4 {
        return Err(Error::DegenerateInput(format!(
            "need at least 4 colors, got {}",
            points.len()
        )));
    }
    let eig = covariance_eigen_weighted(points, weights)?;
    let plane = plane_from_eigen(&eig)?;
    let (us, vs): (Vec<f64>, Vec<f64>) = points
        .iter()
        .map(|p| {
            let (u, v, _) = plane.project(*p);
            (u, v)
        })
        .unzip();
    let fit = fit_polynomial(&us, &vs, 3, weights)?;
    let c = &fit.polynomial.coefficients;
    let coefficients = [c[0], c[1], c[2], c[3]];

    let (lo, hi) = us
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), u| {
            (a.min(*u), b.max(*u))
        });
    let pad = (hi - lo) * config.extrapolation_fraction;
    let domain = [lo - pad, hi + pad];
    let full = CurveModel::from_parts(
        plane,
        coefficients,
        domain,
        config.sample_count,
        eig.planarity(),
        None,
    )?;
    if !config.trim_to_cube {
        return Ok(full);
    }

    // longest run of samples inside the inflated cube
    let inside: Vec<bool> = full
        .samples
        .iter()
        .map(|s| s.in_cube(config.cube_margin))
        .collect();
    let (mut best, mut start) = ((0usize, 0usize), None);
    for (i, &ok) in inside.iter().chain(std::iter::once(&false)).enumerate() {
        match (ok, start) {
            (true, None) => start = Some(i),
            (false, Some(s)) => {
                if i - s > best.1 - best.0 {
                    best = (s, i);
                }
                start = None;
            }
            _ => {}
        }
    }
    let (first, end) = best;
    if end - first < 2 {
        return Err(Error::DegenerateInput(
            "fitted curve lies outside the RGB cube".into(),
        ));
    }
    if first == 0 && end == inside.len() {
        return Ok(full);
    }
    let step = (domain[1] - domain[0]) / (config.sample_count - 1) as f64;
    let u_at = |i: usize| {
        if i == config.sample_count - 1 {
            domain[1]
        } else {
            domain[0] + step * i as f64
        }
    };
    CurveModel::from_parts(
        plane,
        coefficients,
        [u_at(first), u_at(end - 1)],
        end - first,
        eig.planarity(),
        None,
    )
}

/// Nearest polyline sample to `query` (lowest index on ties).
pub fn distance_to_curve(query: RgbPoint, model: &CurveModel) -> CurveDistance {
    let mut best = 0;
    let mut best_d = f64::INFINITY;
    for (i, s) in model.samples.iter().enumerate() {
        let d = s.distance_squared(query);
        if d < best_d {
            best_d = d;
            best = i;
        }
    }
    CurveDistance {
        distance: best_d.sqrt(),
        nearest_sample_index: best,
        nearest_point: model.samples[best],
    }
}

/// Marks raw pixels whose curve distance is at least `d_t`.
pub fn outlier_mask(image: &RasterImage, model: &CurveModel, d_t: f64) -> OutlierMask {
    let bits = model
        .distances(image.pixels())
        .iter()
        .map(|d| d.distance >= d_t)
        .collect();
    let mask = Mask::new(image.width(), image.height(), bits).expect("mask matches image");
    let outlier_fraction = mask.fraction();
    OutlierMask {
        mask,
        outlier_fraction,
    }
}
