//! # colorcurve
//!
//! Compact color-appearance models for single-process materials.
//!
//! The colors of a material whose appearance comes from one dominant process
//! (baking, ripening, shading of a uniform surface) occupy a thin planar
//! subset of RGB space. This crate quantizes an exemplar, measures how
//! planar its palette is, fits a cubic curve in the best-fit plane, and uses
//! that curve to:
//!
//! - label color variation as shading-change or reflectance-change,
//! - mark off-model pixels,
//! - detect and segment similar material in probe images,
//! - score how well a probe spans the exemplar's curve.
//!
//! ```
//! use colorcurve::{curve, matcher, quantize, synth};
//!
//! let reference = synth::ReferenceCurve::browning();
//! let exemplar = synth::curve_exemplar(&reference, 128, 128, 3.0, 7);
//! let palette = quantize::quantize(&exemplar, quantize::QuantizeMethod::MinimumVariance, 256)?;
//! let model = curve::fit_curve(&palette)?;
//! let found = matcher::detect(&exemplar, &model, &matcher::DetectionParams::default())?;
//! assert!(found.accepted().count() >= 1);
//! # Ok::<(), colorcurve::Error>(())
//! ```

// NaN-rejecting `!(x >= 0.0)` checks and index loops over small matrices
// are intentional.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod color;
pub mod curve;
pub mod eigen;
pub mod error;
pub mod image;
pub mod matcher;
pub mod overlay;
pub mod polyfit;
pub mod quantize;
pub mod shading;
pub mod spectral;
pub mod synth;

pub use color::RgbPoint;
pub use curve::{CurveConfig, CurveDistance, CurveModel};
pub use error::{Error, Result};
pub use image::{Mask, RasterImage};
pub use quantize::{Palette, QuantizeMethod};
pub use spectral::{EigenDecomposition, OriginLine, PlanarityMeasure, PlaneFrame};
